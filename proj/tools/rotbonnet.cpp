#include "rotbonnet/cli.hpp"

#include "CLI11.hpp"

int main(int argc, char* argv[])
{
    CLI::App app{"rotbonnet: immersions into rotational hypersurfaces"};
    app.require_subcommand(1, 1);

    rotbonnet::RunOptions opt;
    std::uint64_t seed = 0;
    for (const char* name : {"check", "lift", "reconstruct", "ambient-validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "scenario file")->required();
        sub->add_option("--out-dir", opt.out_dir, "directory for reports and exports");
        sub->add_option("--seed", seed, "seed for randomised draws (overrides the scenario)");
        sub->add_option("--tol-scale", opt.tol_scale, "uniform tolerance multiplier");
        sub->add_flag("--quiet", opt.quiet, "suppress tables on standard output");
        sub->callback([&opt, sub, name, &seed] {
            opt.subcommand = name;
            if (sub->count("--seed")) opt.seed = seed;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return rotbonnet::ExitConfig;
    }
    return rotbonnet::run(opt).exit_code;
}
