#include <CLI11.hpp>

#include "objstab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"objstab: atomistic stability analysis of objective structures"};
    app.set_version_flag("--version", objstab::version_string());
    app.require_subcommand(1);

    objstab::CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("--a", opt.a, "override the family scale factor");
        sub->add_option("--alpha", opt.alpha, "override the family twist angle");
        sub->add_option("--grid", opt.grid, "wave-vector grid points per K dimension");
        sub->add_option("--seminorm", opt.seminorm, "verdict gate: R, R00 or both")
            ->check(CLI::IsMember({"R", "R00", "both"}));
        sub->add_option("--mode", opt.mode, "rank-deficient k handling: strict or extended")
            ->check(CLI::IsMember({"strict", "extended"}));
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_flag("--oracle", opt.oracle, "run dual-route and supercell cross-checks");
        sub->add_flag("--ideal", opt.ideal, "nanotube: use the ideal reference point");
        sub->add_flag("--relax-x", opt.relax_x, "nanotube: relax x at fixed (a, alpha)");
        return sub;
    };

    for (const char* name : {"validate", "critical", "dual", "seminorm", "curve", "stability", "relax"})
        add_common(app.add_subcommand(name));
    auto* sweep = add_common(app.add_subcommand("sweep"));
    sweep->add_option("--a-min", opt.a_min, "sweep start")->required();
    sweep->add_option("--a-max", opt.a_max, "sweep end")->required();
    sweep->add_option("--a-steps", opt.a_steps, "sweep sample count")->required();

    CLI11_PARSE(app, argc, argv);
    opt.subcommand = app.get_subcommands().front()->get_name();
    return objstab::run_cli(opt);
}
