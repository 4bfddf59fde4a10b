#ifndef SUSYOPAL_VERIFY_HPP
#define SUSYOPAL_VERIFY_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "susyopal/algebras.hpp"

namespace susyopal {

struct CheckConfig {
  int rank = 2;
  std::string assume;  // "", "unimodular", "nice-volume", "regular"
  int reduction_degree = 1;
  int prolongation = 1;
  bool include_optional = false;
};

struct CheckReport {
  std::string name;
  CheckConfig config;
  bool pass = false;
  bool optional_tier = false;
  std::string residual = "0";           // rendered; "0" on pass
  std::vector<std::string> relations_used;
  std::vector<std::string> notes;       // pinned conventions, values, dictionaries
  long ms = 0;
  std::string error;                    // set when the check threw
};

// zero modes of the N=2 pair, in the engine's pinned normalization
struct TwistOperators {
  const AlgebraPresentation &pres;
  BracketContext &ctx;
  FieldExpr H, J;

  // L0 = (1/2)(H_(1|0) + i J_(0|1)); J0 = -i J_(0|1);
  // Q0 = (1/2)(H_(0|1) + i J_(0|0)); G0 = (1/2)(H_(0|1) - i J_(0|0))
  FieldExpr L0(const FieldExpr &x);
  FieldExpr J0(const FieldExpr &x);
  FieldExpr Q0(const FieldExpr &x);
  FieldExpr G0(const FieldExpr &x);
};

using CheckFn = std::function<CheckReport(const CheckConfig &)>;

const std::vector<std::string> &check_names();
bool check_is_optional(const std::string &name);
CheckReport run_check(const std::string &name, const CheckConfig &cfg);
// runs the registry in name order; concurrency capped by SUSYOPAL_THREADS
std::vector<CheckReport> run_all(const CheckConfig &cfg);

}  // namespace susyopal

#endif
