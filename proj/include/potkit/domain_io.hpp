#pragma once

// Domain files.
//
//   # comment
//   kind = disc | half_plane | disc_complement | polygon
//   cx = <real>          disc, disc_complement (default 0)
//   cy = <real>          disc, disc_complement (default 0)
//   r = <real>           disc, disc_complement (required, > 0)
//   vertices = x0,y0; x1,y1; ...   polygon (required, counter-clockwise)
//
// Keys that are unknown, or not valid for the given kind, are rejected.

#include "potkit/geom.hpp"
#include "potkit/kv.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace potkit {

inline DomainSpec parse_domain(std::string_view text) {
  const auto kv = parse_kv(text);
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw Error(ErrorKind::ParseError, "domain file: missing 'kind'");
  const std::string& kind = kind_it->second;

  std::set<std::string, std::less<>> allowed{"kind"};
  if (kind == "disc" || kind == "disc_complement") {
    allowed.insert({"cx", "cy", "r"});
  } else if (kind == "polygon") {
    allowed.insert("vertices");
  } else if (kind != "half_plane") {
    throw Error(ErrorKind::ParseError, "domain file: unknown kind '" + kind + "'");
  }
  for (const auto& [key, value] : kv) {
    if (!allowed.contains(key))
      throw Error(ErrorKind::ParseError, "domain file: key '" + key + "' is not valid for kind '" + kind + "'");
  }

  if (kind == "half_plane") return DomainSpec::half_plane();
  if (kind == "polygon") {
    const auto it = kv.find("vertices");
    if (it == kv.end()) throw Error(ErrorKind::ParseError, "domain file: polygon needs 'vertices'");
    return DomainSpec::polygon(parse_point_list(it->second, "vertices"));
  }
  auto real_or = [&](std::string_view key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_real(it->second, key);
  };
  if (!kv.contains("r")) throw Error(ErrorKind::ParseError, "domain file: '" + kind + "' needs 'r'");
  const ComplexPoint center(real_or("cx", 0.0), real_or("cy", 0.0));
  const double r = real_or("r", 0.0);
  return kind == "disc" ? DomainSpec::disc(center, r) : DomainSpec::disc_complement(center, r);
}

inline DomainSpec load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open domain file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_domain(buffer.str());
}

inline std::string format_domain(const DomainSpec& d) {
  KvWriter w;
  w.add("kind", to_string(d.kind()));
  std::visit(
      [&](const auto& dom) {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc> || std::is_same_v<T, DiscComplement>) {
          w.add("cx", dom.center.re()).add("cy", dom.center.im()).add("r", dom.radius);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          std::string list;
          for (std::size_t i = 0; i < dom.vertices.size(); ++i) {
            if (i > 0) list += "; ";
            list += format_real(dom.vertices[i].re()) + "," + format_real(dom.vertices[i].im());
          }
          w.add("vertices", list);
        }
      },
      d.variant());
  return w.str();
}

}  // namespace potkit
