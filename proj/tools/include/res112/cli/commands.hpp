#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "res112/cli/table.hpp"
#include "res112/model.hpp"

namespace res112::cli {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BifdiagConfig {
    double kappa = 1.0;
    std::vector<double> ells;
    double lambda_min = -2.0, lambda_max = 2.0;
    int grid = 401;          // lambda nodes per slice
    int a_scan = 200;        // sub-intervals when solving ell(a) = ell0 on a family
    bool oracle = true;      // numeric-oracle overlay
    bool surface = true;
    int surface_grid = 41;   // per axis
    int workers = 1;
};

struct CritvalsConfig {
    ModelParams params;
    int grid = 41;
    std::optional<std::pair<double, double>> mu_range, ell_range;
    double tol = 1e-10;
    int workers = 1;
};

struct FiberConfig {
    ModelParams params;
    double mu = 0.0, ell = 0.0, h = 0.0;
};

struct MonodromyConfig {
    ModelParams params;
    std::string loop;       // gamma1 | gamma2 | gamma3
    std::string loop_file;  // CSV with mu,iota,h
    int points = 48;
    double radius_scale = 1.0;
    bool reverse = false;
    double tol = 1e-12;
    int workers = 1;
};

struct ScaleConfig {
    double kappa = 1.0;
    double lambda = 0.0, mu = 0.0, ell = 0.0, h = 0.0;
    double R = 0.0, X = 0.0, Y = 0.0;
    bool to_kappa = false;  // default carries the kappa frame onto kappa = 1
};

std::vector<Table> bifdiag_tables(const BifdiagConfig& c);
std::vector<Table> critvals_tables(const CritvalsConfig& c);
std::vector<Table> fiber_tables(const FiberConfig& c);
std::vector<Table> monodromy_tables(const MonodromyConfig& c);
std::vector<Table> scale_tables(const ScaleConfig& c);

// "CuspPinchedT3 ×1 + Torus3 ×2"
std::string fiber_text(const Table& t);

// Runs the selected acceptance criteria (empty: all); returns the exit code.
using SelfcheckFn = std::function<int(const std::vector<int>& only, std::ostream& out)>;

// Full command line without the program name. Returns the process exit code:
// 0 success, 1 validation error, 2 numerical failure, 3 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const SelfcheckFn& selfcheck = {});

}  // namespace res112::cli
