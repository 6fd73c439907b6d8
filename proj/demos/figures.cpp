// Writes orbit plots for a handful of parameter pairs into a directory
// (default: ./figures). The first plot overlays the certified 8-arc circle.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "pwlin/pwlin.hpp"

int main(int argc, char** argv) {
    using namespace pwlin;
    const std::filesystem::path dir = argc > 1 ? argv[1] : "figures";
    std::filesystem::create_directories(dir);

    const double g = std::pow(2.0, 0.25);
    const Params bunny{g, -g};
    PlotSpec spec;
    spec.params = bunny;
    spec.iterations = 10000;
    spec.path = (dir / "circle_8_arcs.svg").string();
    const auto rel = orbit_relation(bunny, 100);
    if (rel) spec.overlay = circle_to_polyline(build_invariant_circle(bunny, *rel), 512);
    emit_svg(spec);
    std::printf("%s\n", spec.path.c_str());

    struct Item {
        const char* name;
        Params p;
    };
    for (const Item& it : {Item{"orbit_0.2_-0.7", {0.2, -0.7}}, Item{"orbit_1.4_-1.4", {1.4, -1.4}},
                           Item{"orbit_-0.9_-4", {-0.9, -4}}, Item{"orbit_1.5_1.1", {1.5, 1.1}},
                           Item{"orbit_1.9_-0.2", {1.9, -0.2}}}) {
        PlotSpec s;
        s.params = it.p;
        s.iterations = 100000;
        s.path = (dir / (std::string(it.name) + ".svg")).string();
        emit_svg(s);
        const ClassRecord rec = classify(it.p, 100000);
        std::printf("%s  %s\n", s.path.c_str(), to_string(rec.verdict));
    }
    return 0;
}
