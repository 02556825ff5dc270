#pragma once

#include <vector>

#include "xxz/core.hpp"

// Reference levels printed alongside the two worked examples: energies and
// Bethe roots, transcribed verbatim (6 significant digits, mixed reflection
// representatives). Roots written as i*pi and -i*pi/2 are kept symbolic.

namespace xxz::golden {

struct GoldenLevel {
    cplx energy;
    std::vector<cplx> roots;
};

/// N = 4, s = 1/2, eta = 7 i pi / 5, alpha- = 0.45 i, alpha+ = 0.87 i,
/// beta+- = eta, theta+- = 0.54.
inline ModelParams table1_params() { return case2_params({4, 1, 7, 5}, {0.0, 0.45}, {0.0, 0.87}, 0.54); }

/// N = 2, s = 1, eta = 4 i pi / 7, alpha- = i pi / 2, beta- = 0.651,
/// alpha+ = 0.734 i, beta+ = eta, theta+- = 0.386.
inline ModelParams table2_params() {
    return case1_params({2, 2, 4, 7}, Side::Plus, {0.0, 0.734}, Side::Minus, 0.651, 0.386);
}

inline constexpr double table1_tolerance = 1e-4;
inline constexpr double table2_tolerance = 5e-5;

inline const std::vector<GoldenLevel>& table1_levels() {
    static const std::vector<GoldenLevel> rows = {
        {{-4.56711, 0.0},
         {{0.475167, 0.000593}, {0.475167, -1.25723}, {0.057772, 1.88496}, {0.057772, pi}, {0.0, -2.19745}, {0.0, -1.70664}, {0.0, -2.68126}, {0.0, 0.314088}, {0.0, -0.87}, {0.0, 1.57187}}},
        {{-4.34568, 0.0},
         {{0.405517, 0.666815}, {0.405517, -1.92345}, {0.403252, -0.628319}, {0.0569468, -2.70038}, {0.0569468, 1.44374}, {0.0, 2.36338}, {0.0, -pi / 2}, {0.0, -1.70664}, {0.0, -2.82866}, {0.0, -0.386637}}},
        {{-3.05199, 0.0},
         {{0.693961, -2.18827}, {0.693961, 0.931636}, {0.0, -0.824282}, {0.0, 0.45}, {0.0, -0.386637}, {0.0, -1.96144}, {0.0, -1.57051}, {0.0, 1.54118}, {0.0, -2.8309}, {0.0, 2.80606}}},
        {{-2.38474, 0.0},
         {{0.717734, 0.933002}, {0.717734, -2.18964}, {0.0, -0.323985}, {0.0, -2.01785}, {0.0, -1.56819}, {0.0, -0.87}, {0.0, -1.70664}, {0.0, 1.57883}, {0.0, 2.82555}, {0.0, -2.70265}}},
        {{-2.17816, 0.0},
         {{0.722701, -2.18991}, {0.722701, 0.933271}, {0.0, 0.317914}, {0.0, -0.949003}, {0.0, -1.70664}, {0.0, -2.81586}, {0.0, 2.19787}, {0.0, 0.767594}, {0.0, 1.44577}, {0.0, -0.386637}}},
        {{-0.994085, 0.0},
         {{0.590036, 2.51327}, {0.572252, -0.628319}, {0.0, -0.386637}, {0.0, -0.852939}, {0.0, 0.666397}, {0.0, -1.70664}, {0.0, 0.312972}, {0.0, 1.57986}, {0.0, 2.81222}, {0.0, 1.5305}}},
        {{-0.603975, 0.0},
         {{0.602144, 2.51327}, {0.585957, -0.628319}, {0.0, -1.96477}, {0.0, -0.87}, {0.0, 0.45}, {0.0, -0.335719}, {0.0, -1.56682}, {0.0, 2.82363}, {0.0, 1.58342}, {0.0, 1.46666}}},
        {{-0.243163, 0.0},
         {{0.609459, 2.51327}, {0.594107, -0.628319}, {0.0, 0.322076}, {0.0, -1.70664}, {0.0, -0.952266}, {0.0, -0.386637}, {0.0, 0.723371}, {0.0, -2.80224}, {0.0, 2.19738}, {0.0, 1.46531}}},
        {{1.14152, -0.195122},
         {{0.35837, -2.71807}, {0.330039, 2.30814}, {0.276567, 0.656084}, {0.087861, -0.795393}, {0.027171, -0.308006}, {0.015303, -1.55285}, {0.001193, 2.82864}, {0.000753, -2.847}, {0.0, -0.386637}, {0.0, 0.45}}},
        {{1.14152, 0.195122},
         {{0.35837, 1.46144}, {0.330039, 2.71841}, {0.276567, -1.91272}, {0.087861, -0.461244}, {0.027171, -0.948631}, {0.015303, 0.296211}, {0.001193, 2.19791}, {0.000753, 1.59036}, {0.0, 0.45}, {0.0, -0.386637}}},
        {{1.6454, -0.036207},
         {{0.37612, -2.71959}, {0.347861, 2.30928}, {0.266598, 0.632143}, {0.126391, -0.803703}, {0.021899, 1.52824}, {0.013806, 0.376725}, {0.008631, -0.942847}, {0.000513, 2.19931}, {0.0, 0.45}, {0.0, -0.386637}}},
        {{1.6454, 0.036207},
         {{0.37612, 1.46295}, {0.347861, 2.71727}, {0.266598, -1.88878}, {0.126391, -0.452934}, {0.021899, -2.78488}, {0.013806, -1.63336}, {0.008631, -0.31379}, {0.000513, 2.82724}, {0.0, -1.70664}, {0.0, -0.87}}},
        {{1.87399, -0.362703},
         {{0.382144, -2.74196}, {0.357472, 2.28825}, {0.228038, 0.649592}, {0.144987, -0.887371}, {0.120703, 0.3564}, {0.035021, -2.7448}, {0.000215, -0.93752}, {0.000022, 2.19938}, {0.0, 0.45}, {0.0, -0.386637}}},
        {{1.87399, 0.362703},
         {{0.382144, 1.48532}, {0.357472, 2.7383}, {0.228038, -1.90623}, {0.144987, -0.369266}, {0.120703, -1.61304}, {0.035021, 1.48816}, {0.000215, -0.319117}, {0.000022, 2.82716}, {0.0, -1.70664}, {0.0, -0.386637}}},
        {{3.41127, 0.0},
         {{0.426274, 0.768867}, {0.426274, -2.0255}, {0.380283, -2.48686}, {0.380283, 1.23022}, {0.264586, 2.51327}, {0.0, -0.46653}, {0.0, -0.87}, {0.0, -1.70664}, {0.0, 2.19908}, {0.0, -0.942942}}},
        {{5.63582, 0.0},
         {{0.610828, 2.51327}, {0.585745, -0.628319}, {0.264927, -2.30695}, {0.264927, 1.05031}, {0.239528, 2.51327}, {0.0, -0.386637}, {0.0, -0.786041}, {0.0, 0.45}, {0.0, -0.313583}, {0.0, 2.19908}}},
    };
    return rows;
}

inline const std::vector<GoldenLevel>& table2_levels() {
    static const std::vector<GoldenLevel> rows = {
        {{-5.983890, 0.0},
         {{0.705185, 1.409455}, {0.705185, 3.078533}, {0.548923, -1.646975}, {0.548923, -0.148219}, {0.210780, 3.018164}, {0.210780, 1.469825}, {0.0, -0.367144}, {0.0, 2.080271}, {0.0, -2.080446}, {0.0, -2.407592}}},
        {{-4.833822, -0.089904},
         {{0.565328, 1.464054}, {0.560227, 3.079482}, {0.383486, -1.400808}, {0.370909, 0.713516}, {0.359969, -2.475472}, {0.253186, -0.363528}, {0.103171, 1.549115}, {0.000260, 2.081055}, {0.000123, 0.285436}, {0.0, -2.407592}}},
        {{-4.833822, 0.089904},
         {{0.565328, 3.023935}, {0.560227, 1.408507}, {0.383486, -0.394387}, {0.370909, -2.508711}, {0.359969, 0.680276}, {0.253186, -1.431667}, {0.103171, 2.938874}, {0.000260, 2.406933}, {0.000123, -2.080631}, {0.0, 0.612397}}},
        {{-2.835193, -0.109209},
         {{0.577091, 1.584580}, {0.454273, -2.807273}, {0.444406, 0.861744}, {0.443204, -0.977039}, {0.343279, 2.736768}, {0.251255, -1.788773}, {0.016001, 0.153832}, {0.011279, 1.949951}, {0.001045, 0.732900}, {0.0, -2.407592}}},
        {{-2.835193, 0.109209},
         {{0.577091, 2.903409}, {0.454273, 1.012077}, {0.444406, -2.656940}, {0.443204, -0.818156}, {0.343279, 1.751220}, {0.251255, -0.006423}, {0.016001, -1.949027}, {0.011279, 2.538038}, {0.001045, -2.528096}, {0.0, 0.612397}}},
        {{-1.859189, -0.040090},
         {{0.624365, 3.096684}, {0.613412, 1.442585}, {0.469863, -1.439936}, {0.313319, -0.296575}, {0.171303, 1.588756}, {0.025225, -2.380049}, {0.019867, 2.114178}, {0.019825, 0.318497}, {0.003054, 0.717989}, {0.0, -2.407592}}},
        {{-1.859189, 0.040090},
         {{0.624365, 1.391305}, {0.613412, 3.045404}, {0.469863, -0.355259}, {0.313319, -1.498621}, {0.171303, 2.899233}, {0.025225, 0.584854}, {0.019867, 2.373811}, {0.019825, -2.113692}, {0.003054, -2.513185}, {0.0, -2.407592}}},
        {{-0.818531, -0.180442},
         {{0.607702, 1.556139}, {0.466814, -3.064030}, {0.444104, 0.768879}, {0.415149, -1.265817}, {0.343162, -2.450324}, {0.109869, 0.650801}, {0.056399, 2.447113}, {0.055560, -2.041603}, {0.010588, -2.518368}, {0.0, -2.407592}}},
        {{-0.818531, 0.180442},
         {{0.607702, 2.931849}, {0.466814, 1.268834}, {0.444104, -2.564075}, {0.415149, -0.529378}, {0.343162, 0.655129}, {0.109869, -2.445997}, {0.056399, 2.040875}, {0.055561, 0.246407}, {0.010588, 0.723172}, {0.0, 0.612397}}},
    };
    return rows;
}
}  // namespace xxz::golden
