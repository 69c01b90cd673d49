#include "td3fg/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "td3fg/errors.hpp"
#include "td3fg/harness.hpp"
#include "td3fg/textio.hpp"

namespace td3fg {

static const char* kCsvHeader =
    "step,mean_return,fr,hr,cc,tc,alpha,beta,gamma_w,delta_w,critic_loss,"
    "actor_loss";

void emit_csv(const RunLog& log, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : log.rows) {
    out << r.step << ',' << fmt_double(r.mean_return) << ',' << fmt_double(r.fr)
        << ',' << fmt_double(r.hr) << ',' << fmt_double(r.cc) << ','
        << fmt_double(r.tc) << ',' << fmt_double(r.alpha) << ','
        << fmt_double(r.beta) << ',' << fmt_double(r.gamma_w) << ','
        << fmt_double(r.delta_w) << ',' << fmt_double(r.critic_loss) << ','
        << fmt_double(r.actor_loss) << '\n';
  }
}

void emit_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  emit_csv(log, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

std::vector<EvalRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw IoError("parse_csv: bad header");
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split(trim(line), ',');
    if (f.size() != 12) throw IoError("parse_csv: bad field count");
    EvalRow r;
    r.step = parse_int(f[0]);
    r.mean_return = parse_double(f[1]);
    r.fr = parse_double(f[2]);
    r.hr = parse_double(f[3]);
    r.cc = parse_double(f[4]);
    r.tc = parse_double(f[5]);
    r.alpha = parse_double(f[6]);
    r.beta = parse_double(f[7]);
    r.gamma_w = parse_double(f[8]);
    r.delta_w = parse_double(f[9]);
    r.critic_loss = parse_double(f[10]);
    r.actor_loss = parse_double(f[11]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<EvalRow> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return parse_csv(in);
}

namespace {

const char* kPalette[] = {"#3366cc", "#dc3912", "#ff9900", "#109618",
                          "#990099", "#0099c6", "#dd4477", "#66aa00"};

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void emit_svg_curves(const std::vector<RunLog>& logs, std::ostream& out) {
  if (logs.empty()) throw EmptyError("emit_svg_curves: no run logs");

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& log : logs)
    for (const auto& r : log.rows) {
      const double x = static_cast<double>(r.step);
      if (first) {
        x_min = x_max = x;
        y_min = y_max = r.mean_return;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, r.mean_return);
        y_max = std::max(y_max, r.mean_return);
      }
    }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const double width = 900, height = 520;
  const double ml = 70, mr = 20, mt = 30, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  // axes + ticks
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\""
        << sx(fx) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\">" << fmt_tick(fx) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml
        << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\">" << fmt_tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">environment steps</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
      << ")\">mean eval return</text>\n";

  for (std::size_t k = 0; k < logs.size(); ++k) {
    const auto& log = logs[k];
    if (log.rows.empty()) continue;
    const char* color = kPalette[k % 8];
    std::ostringstream pts;
    for (const auto& r : log.rows)
      pts << sx(static_cast<double>(r.step)) << ',' << sy(r.mean_return) << ' ';
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    out << "<text x=\"" << ml + pw - 6 << "\" y=\"" << mt + 16 + 16 * k
        << "\" text-anchor=\"end\" fill=\"" << color << "\">"
        << log.config.run_name << " seed " << log.seed << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void emit_svg_curves(const std::vector<RunLog>& logs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  emit_svg_curves(logs, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace td3fg
