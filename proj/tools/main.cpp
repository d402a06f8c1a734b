#include <iostream>

#include "cellwave/error.hpp"
#include "commands.hpp"

using namespace cellwave;

int main(int argc, char** argv) {
  cli::Globals g;
  g.argv.assign(argv, argv + argc);

  CLI::App app{"Stochastic reaction-diffusion simulations and analyses"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);
  app.add_option("--out", g.out, "Run directory (default $CELLWAVE_OUT/<command> or runs/<command>)");
  app.add_option("--jobs", g.jobs, "Worker threads; 0 uses every core")->capture_default_str();
  app.fallthrough();  // global options may follow the subcommand
  cli::add_simulate(app, g);
  cli::add_analyze(app, g);
  cli::add_reproduce(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
