// Generates a synthetic run-to-failure corpus in the 26-column turbofan text
// format, matching the published unit/condition/fault-mode structure of the
// four sub-datasets.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lhi/error.hpp"
#include "lhi/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic turbofan degradation corpus generator"};
    std::string out_dir = "data";
    std::string dataset = "all";
    std::uint64_t seed = 7;
    lhi::synthetic::SynthParams defaults;
    double noise_base = defaults.noise_base;
    double spread = defaults.unit_noise_spread;
    double horizon = defaults.degradation_horizon;
    double power = defaults.degradation_power;
    double severity_std = defaults.severity_log_std;
    app.add_option("--out", out_dir, "target directory");
    app.add_option("--dataset", dataset, "FD001..FD004, or 'all'");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--noise-base", noise_base, "sensor noise std relative to magnitude");
    app.add_option("--noise-spread", spread, "per-unit noise factor half-range");
    app.add_option("--horizon", horizon, "degradation ramp length in cycles");
    app.add_option("--power", power, "degradation ramp exponent");
    app.add_option("--severity-std", severity_std, "log-std of per-unit severity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(lhi::ExitCode::usage);
    }

    try {
        auto tuned = [&](lhi::synthetic::SynthParams p) {
            p.noise_base = noise_base;
            p.unit_noise_spread = spread;
            p.degradation_horizon = horizon;
            p.degradation_power = power;
            p.severity_log_std = severity_std;
            return p;
        };
        if (dataset == "all") {
            for (const char* name : {"FD001", "FD002", "FD003", "FD004"}) {
                lhi::synthetic::write_dataset(out_dir,
                                              tuned(lhi::synthetic::synth_params_for(name, seed)));
            }
            std::cout << "wrote FD001..FD004 into " << out_dir << "\n";
        } else {
            lhi::synthetic::write_dataset(out_dir,
                                          tuned(lhi::synthetic::synth_params_for(dataset, seed)));
            std::cout << "wrote " << dataset << " into " << out_dir << "\n";
        }
        return 0;
    } catch (const lhi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(lhi::ExitCode::io);
    }
}
