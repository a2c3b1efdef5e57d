#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "quickinv/invert.hpp"
#include "quickinv/verify.hpp"

namespace quickinv::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitRuntime = 70;

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "QUICKINV_OUT_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// start:stop:count[:geom], linear unless geom.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool geometric = false;

  static GridSpec parse(std::string_view text);  // throws UsageError
  std::vector<double> points() const;
};

enum class OutputFormat { Csv, Json, Both };

struct RunConfig {
  QuadConfig quad{};
  std::vector<double> grid{0.5, 1.0, 2.0, 5.0};
  double tol = 1e-6;
  double floor = 1e-8;
  std::filesystem::path out_dir;
  OutputFormat format = OutputFormat::Both;
  int workers = 1;

  // Throws UsageError.
  void validate() const;
  VerifyConfig verify_config() const;
  // The part that determines results; embedded in every JSON report.
  // Output location, format and worker count are deliberately excluded.
  nlohmann::json effective() const;
  // Applies the keys present in a JSON config document over this one.
  void merge(const nlohmann::json& j);
};

// Default output directory: $QUICKINV_OUT_DIR, else ./quickinv_out.
std::filesystem::path default_out_dir();

// Comma-separated selectors; "all" selects everything. Throws UsageError
// listing the valid names.
std::vector<IdentityId> select_identities(std::string_view text);
std::vector<TestFunction> select_functions(std::string_view text);

int cmd_list(const std::vector<TestFunction>& functions, std::ostream& out);
int cmd_check(const std::vector<IdentityId>& ids, const std::vector<TestFunction>& functions,
              const RunConfig& cfg, std::ostream& out);
int cmd_invert(const InversionMethod& method, const TestFunction& f, const RunConfig& cfg,
               std::ostream& out);
int cmd_bench(const std::vector<IdentityId>& ids, const std::vector<TestFunction>& functions,
              const RunConfig& cfg, std::ostream& out);
int cmd_plotdata(IdentityId id, const TestFunction& f, const RunConfig& cfg, std::ostream& out);

// Parses arguments and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quickinv::cli
