#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace td3fg {

struct RunLog;
struct EvalRow;

// CSV of the eval rows. Header:
// step,mean_return,fr,hr,cc,tc,alpha,beta,gamma_w,delta_w,critic_loss,actor_loss
// Values carry 17 significant digits, so a parse round-trip is exact.
void emit_csv(const RunLog& log, std::ostream& out);
void emit_csv(const RunLog& log, const std::string& path);
std::vector<EvalRow> parse_csv(std::istream& in);
std::vector<EvalRow> parse_csv(const std::string& path);

// Line chart of mean return vs step, one polyline per run.
void emit_svg_curves(const std::vector<RunLog>& logs, std::ostream& out);
void emit_svg_curves(const std::vector<RunLog>& logs, const std::string& path);

}  // namespace td3fg
