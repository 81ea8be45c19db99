#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cqlearn/error.hpp"
#include "cqlearn/instances.hpp"

namespace cqlearn {

// Instance text format (UTF-8):
//
//   # comment lines start with '#'; blank lines are ignored
//   # meta kind=grid N=8 k=192        (optional; restores InstanceMeta)
//   d n
//   <n lines of d rationals "p/q" or integers>
//   w: <d rationals>                  (0 lines: bare pool, 1: instance, n+1: witness with c0 first)

/// A file's raw content before it is classified.
struct InstanceFile {
  std::size_t dim = 0;
  Pool pool;
  std::vector<LinearConcept> concepts;
  std::string meta;  // text after "# meta ", if present
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  if (tok.empty()) throw ParseError(line, std::string("missing ") + what);
  for (char c : tok) {
    if (c < '0' || c > '9') throw ParseError(line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline RationalVector parse_coords(const std::vector<std::string_view>& toks, std::size_t first,
                                   std::size_t dim, std::size_t line) {
  if (toks.size() - first != dim)
    throw ParseError(line, "expected " + std::to_string(dim) + " coordinates, found " +
                               std::to_string(toks.size() - first));
  RationalVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    try {
      v[i] = parse_rational(toks[first + i]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  }
  return v;
}

}  // namespace detail

inline InstanceFile parse_instance_file(std::string_view text) {
  InstanceFile out;
  bool have_header = false;
  std::size_t expected_points = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks[0].front() == '#') {
      if (toks.size() >= 2 && toks[0] == "#" && toks[1] == "meta") {
        out.meta.clear();
        const auto rest = detail::split_ws(line.substr(line.find("meta") + 4));
        for (std::size_t i = 0; i < rest.size(); ++i) (out.meta += i ? " " : "") += rest[i];
      }
      continue;
    }
    if (!have_header) {
      if (toks.size() != 2) throw ParseError(line_no, "header must be 'd n'");
      out.dim = detail::parse_count(toks[0], line_no, "dimension");
      expected_points = detail::parse_count(toks[1], line_no, "point count");
      if (out.dim == 0) throw ParseError(line_no, "dimension must be positive");
      have_header = true;
      continue;
    }
    if (toks[0] == "w:") {
      if (out.pool.size() != expected_points)
        throw ParseError(line_no, "'w:' line before all " + std::to_string(expected_points) + " points");
      out.concepts.emplace_back(detail::parse_coords(toks, 1, out.dim, line_no));
      continue;
    }
    if (out.pool.size() == expected_points || !out.concepts.empty())
      throw ParseError(line_no, "unexpected line after the point block");
    out.pool.push_back(detail::parse_coords(toks, 0, out.dim, line_no));
  }
  if (!have_header) throw ParseError(1, "missing 'd n' header");
  if (out.pool.size() != expected_points)
    throw ParseError(line_no, "expected " + std::to_string(expected_points) + " points, found " +
                                  std::to_string(out.pool.size()));
  const std::size_t m = out.concepts.size();
  if (m > 1 && m != out.pool.size() + 1)
    throw ParseError(line_no, "found " + std::to_string(m) + " 'w:' lines; expected 0, 1, or n+1 = " +
                                  std::to_string(out.pool.size() + 1));
  return out;
}

namespace detail {

inline std::string meta_value(const std::string& meta, const std::string& key) {
  std::istringstream is(meta);
  std::string tok;
  while (is >> tok)
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  return {};
}

inline void write_pool(std::ostream& os, std::span<const RationalVector> pool, std::size_t dim) {
  os << dim << ' ' << pool.size() << '\n';
  for (const auto& p : pool) {
    for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? " " : "") << to_string(p[i]);
    os << '\n';
  }
}

inline void write_concept(std::ostream& os, const LinearConcept& c) {
  os << "w:";
  for (const auto& x : c.weights()) os << ' ' << to_string(x);
  os << '\n';
}

}  // namespace detail

inline Instance to_instance(const InstanceFile& f) {
  if (f.concepts.size() != 1) throw std::invalid_argument("file does not hold exactly one concept");
  Instance inst;
  inst.pool = f.pool;
  inst.hidden = f.concepts.front();
  const auto kind = detail::meta_value(f.meta, "kind");
  if (kind == "grid") {
    inst.meta.kind = InstanceMeta::Kind::Grid;
    inst.meta.grid_n = std::stoull(detail::meta_value(f.meta, "N"));
  } else if (kind == "margin") {
    inst.meta.kind = InstanceMeta::Kind::Margin;
    inst.meta.eta = parse_rational(detail::meta_value(f.meta, "eta"));
  }
  if (auto k = detail::meta_value(f.meta, "k"); !k.empty()) inst.meta.suggested_k = std::stoull(k);
  inst.meta.clamped = detail::meta_value(f.meta, "clamped") == "1";
  return inst;
}

inline WitnessInstance to_witness(const InstanceFile& f) {
  if (f.pool.empty() || f.concepts.size() != f.pool.size() + 1)
    throw std::invalid_argument("file does not hold n+1 concepts");
  WitnessInstance w;
  w.pool = f.pool;
  w.concepts = f.concepts;
  const auto kind = detail::meta_value(f.meta, "kind");
  if (kind == "r3") {
    w.kind = WitnessInstance::Kind::R3;
    if (auto m = detail::meta_value(f.meta, "M"); !m.empty()) w.base = Integer(m);
  } else if (kind == "margin-witness") {
    w.kind = WitnessInstance::Kind::Margin;
  }
  return w;
}

inline std::string export_instance(const Instance& inst) {
  std::ostringstream os;
  switch (inst.meta.kind) {
    case InstanceMeta::Kind::Grid:
      os << "# meta kind=grid N=" << inst.meta.grid_n << " k=" << inst.meta.suggested_k
         << " clamped=" << (inst.meta.clamped ? 1 : 0) << '\n';
      break;
    case InstanceMeta::Kind::Margin:
      os << "# meta kind=margin eta=" << to_string(inst.meta.eta) << " k=" << inst.meta.suggested_k
         << " clamped=" << (inst.meta.clamped ? 1 : 0) << '\n';
      break;
    case InstanceMeta::Kind::Custom:
      if (inst.meta.suggested_k) os << "# meta kind=custom k=" << inst.meta.suggested_k << '\n';
      break;
  }
  detail::write_pool(os, inst.pool, inst.dim());
  detail::write_concept(os, inst.hidden);
  return os.str();
}

inline std::string export_witness(const WitnessInstance& w) {
  std::ostringstream os;
  switch (w.kind) {
    case WitnessInstance::Kind::R3: os << "# meta kind=r3 M=" << w.base.get_str() << '\n'; break;
    case WitnessInstance::Kind::Margin: os << "# meta kind=margin-witness\n"; break;
    case WitnessInstance::Kind::Custom: break;
  }
  detail::write_pool(os, w.pool, w.pool.empty() ? 0 : w.pool.front().dim());
  for (const auto& c : w.concepts) detail::write_concept(os, c);
  return os.str();
}

}  // namespace cqlearn
