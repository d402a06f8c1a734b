#include "cellwave/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cellwave/error.hpp"

namespace cellwave {

namespace {

enum class Section { None, Parameters, Species, Reactions };

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Cursor {
  std::string_view text;
  std::size_t line;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
    throw ParseError(line, pos + 1, msg, std::move(expected));
  }
  std::string ident() {
    skip_ws();
    if (pos >= text.size() || !is_ident_start(text[pos])) fail("expected identifier", {"identifier"});
    const std::size_t start = pos;
    while (pos < text.size() && is_ident_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }
  void expect(std::string_view tok) {
    skip_ws();
    if (text.substr(pos, tok.size()) != tok) fail("expected '" + std::string(tok) + "'", {"'" + std::string(tok) + "'"});
    pos += tok.size();
  }
  double number(const char* what) {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
            text[pos] == 'e' || text[pos] == 'E' ||
            ((text[pos] == '-' || text[pos] == '+') && (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
      ++pos;
    const std::string lit(text.substr(start, pos - start));
    char* end = nullptr;
    const double v = lit.empty() ? 0.0 : std::strtod(lit.c_str(), &end);
    if (lit.empty() || end != lit.c_str() + lit.size() || !std::isfinite(v)) {
      pos = start;
      fail(std::string("non-numeric ") + what, {"decimal number"});
    }
    return v;
  }
  long integer() {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) {
      pos = start;
      fail("expected integer stoichiometric coefficient", {"integer"});
    }
    return std::stol(std::string(text.substr(start, pos - start)));
  }
};

std::string_view strip_comment(std::string_view line) {
  if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
    line.remove_suffix(1);
  return line;
}

struct PendingReaction {
  Expr propensity;
  std::vector<std::pair<std::string, long>> changes;
  std::size_t line;
  std::vector<std::size_t> change_columns;
  std::string text;
};

// 1-based column of the first whole-word occurrence of `word`, or 1.
std::size_t word_column(const std::string& line, const std::string& word) {
  for (std::size_t p = line.find(word); p != std::string::npos; p = line.find(word, p + 1)) {
    const bool left = p == 0 || !is_ident_char(line[p - 1]);
    const bool right = p + word.size() >= line.size() || !is_ident_char(line[p + word.size()]);
    if (left && right) return p + 1;
  }
  return 1;
}

}  // namespace

ReactionNetwork parse_model(std::string_view text) {
  Section section = Section::None;
  std::map<std::string, double> params;
  std::vector<Species> species;
  std::set<std::string> species_names;
  std::vector<PendingReaction> pending;
  std::set<Section> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = strip_comment(text.substr(start, nl - start));
    ++line_no;
    start = nl + 1;

    Cursor cur{line, line_no};
    if (cur.at_end()) {
      if (nl == text.size()) break;
      continue;
    }
    if (line[cur.pos] == '[') {
      ++cur.pos;
      const std::string name = cur.ident();
      cur.expect("]");
      if (!cur.at_end()) cur.fail("trailing characters after section header", {"end of line"});
      if (name == "parameters") {
        section = Section::Parameters;
      } else if (name == "species") {
        section = Section::Species;
      } else if (name == "reactions") {
        section = Section::Reactions;
      } else {
        throw ParseError(line_no, 2, "unknown section '" + name + "'",
                         {"parameters", "species", "reactions"});
      }
      if (!seen.insert(section).second)
        throw ParseError(line_no, 1, "duplicate section '" + name + "'");
      if (nl == text.size()) break;
      continue;
    }

    switch (section) {
      case Section::None:
        cur.fail("content before the first section header", {"[parameters]", "[species]", "[reactions]"});
      case Section::Parameters: {
        cur.skip_ws();
        const std::size_t name_col = cur.pos + 1;
        const std::string name = cur.ident();
        cur.expect("=");
        const double value = cur.number("parameter value");
        if (!cur.at_end()) cur.fail("trailing characters after parameter value", {"end of line"});
        if (!params.emplace(name, value).second)
          throw ParseError(line_no, name_col, "duplicate parameter '" + name + "'");
        break;
      }
      case Section::Species: {
        cur.skip_ws();
        const std::size_t name_col = cur.pos + 1;
        const std::string name = cur.ident();
        cur.expect(":");
        cur.skip_ws();
        const std::size_t value_col = cur.pos + 1;
        const double d = cur.number("diffusion coefficient");
        if (!cur.at_end()) cur.fail("trailing characters after diffusion coefficient", {"end of line"});
        if (d < 0.0) throw ParseError(line_no, value_col, "negative diffusion coefficient");
        if (!species_names.insert(name).second)
          throw ParseError(line_no, name_col, "duplicate species '" + name + "'");
        species.push_back({name, d});
        break;
      }
      case Section::Reactions: {
        const std::size_t colon = line.rfind(':');
        if (colon == std::string_view::npos)
          cur.fail("reaction line lacks ':' separator", {"':'"});
        PendingReaction r;
        r.line = line_no;
        r.text = std::string(line);
        r.propensity = parse_expression(line.substr(0, colon), line_no, 0);
        Cursor rest{line, line_no, colon + 1};
        for (;;) {
          rest.skip_ws();
          r.change_columns.push_back(rest.pos + 1);
          const std::string sp = rest.ident();
          rest.expect("+=");
          const long c = rest.integer();
          r.changes.emplace_back(sp, c);
          if (rest.at_end()) break;
          rest.expect(",");
        }
        pending.push_back(std::move(r));
        break;
      }
    }
    if (nl == text.size()) break;
  }

  // semantic checks
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < species.size(); ++i) index[species[i].name] = i;
  for (const auto& s : species)
    if (params.count(s.name))
      throw ParseError(1, 1, "'" + s.name + "' declared as both parameter and species");

  std::vector<Reaction> reactions;
  for (const PendingReaction& p : pending) {
    for (const std::string& sym : p.propensity.symbols())
      if (!index.count(sym) && !params.count(sym))
        throw ParseError(p.line, word_column(p.text, sym), "unknown symbol '" + sym + "' in propensity",
                         {"declared species or parameter"});
    Reaction r;
    r.propensity = p.propensity;
    r.stoichiometry.assign(species.size(), 0);
    bool any = false;
    for (std::size_t k = 0; k < p.changes.size(); ++k) {
      const auto& [name, c] = p.changes[k];
      auto it = index.find(name);
      if (it == index.end())
        throw ParseError(p.line, p.change_columns[k], "unknown species '" + name + "'",
                         {"declared species"});
      if (r.stoichiometry[it->second] != 0)
        throw ParseError(p.line, p.change_columns[k], "species '" + name + "' listed twice");
      r.stoichiometry[it->second] = static_cast<int>(c);
      any = any || c != 0;
    }
    if (!any) throw ParseError(p.line, p.change_columns.front(), "reaction changes no species");
    reactions.push_back(std::move(r));
  }
  try {
    return ReactionNetwork(std::move(species), std::move(reactions), std::move(params));
  } catch (const ModelError& e) {
    throw ParseError(1, 1, e.what());
  }
}

std::string serialise_model(const ReactionNetwork& net) {
  auto num = [](double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof buf, "%.*g", prec, v);
      if (std::strtod(buf, nullptr) == v) break;
    }
    return std::string(buf);
  };
  std::ostringstream os;
  os << "[parameters]\n";
  for (const auto& [name, value] : net.parameters()) os << name << " = " << num(value) << "\n";
  os << "\n[species]\n";
  for (const auto& s : net.species()) os << s.name << " : " << num(s.diffusion) << "\n";
  os << "\n[reactions]\n";
  for (const auto& r : net.reactions()) {
    os << r.propensity.to_string() << " :";
    bool first = true;
    for (std::size_t i = 0; i < net.species_count(); ++i) {
      if (r.stoichiometry[i] == 0) continue;
      os << (first ? " " : ", ") << net.species()[i].name << " += " << r.stoichiometry[i];
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

ReactionNetwork load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace cellwave
