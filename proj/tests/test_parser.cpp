#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ntasc/parser.hpp"

using namespace ntasc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kValid = R"(automaton A1 {
  clocks x;
  init l0;
  loc l0 inv x <= 2;
  loc l1;
  edge l0 -> l1 when x >= 1 sync s reset x;
}
automaton A2 {
  clocks y;
  init m0;
  loc m0;
  loc m1;
  edge m0 -> m1 when y < 2 sync s;
}
)";

}  // namespace

TEST_CASE("fixtures are stored in canonical form") {
  const char* names[] = {"fig1.nta",          "fig2.nta",        "fig2_plus_f.nta",
                         "fig3.nta",          "fig3_paper.nta",  "fig3_a2prime.nta",
                         "fig4.nta",          "fig4_a2prime.nta", "fig6.nta",
                         "fig6_a2prime.nta",  "fig7.nta",        "fig10.nta",
                         "pspace_reach.nta",  "pspace_unreach.nta", "pspace_vacuous.nta"};
  for (const char* f : names) {
    INFO(f);
    std::string text = slurp(fixture_path(f));
    Network n = parse(text);
    // Comments are not kept, so compare after stripping comment lines.
    std::istringstream in(text);
    std::ostringstream stripped;
    std::string line;
    while (std::getline(in, line))
      if (line.empty() || line[0] != '#') stripped << line << '\n';
    CHECK(serialize(n) == stripped.str());
  }
}

TEST_CASE("serialization round-trips structurally") {
  Network n = parse(kValid);
  std::string s1 = serialize(n);
  Network m = parse(s1);
  CHECK(serialize(m) == s1);
  CHECK(m.clocks.size() == 2);
  CHECK(m.a1.edges.size() == 1);
  CHECK(m.a1.edges[0].kind == ActKind::Sync);
  CHECK(m.a1.edges[0].resets == std::vector<int>{0});
  CHECK(m.a2.edges[0].guard.atoms[0] == Atom{1, Rel::Lt, 2});
}

TEST_CASE("whitespace and comments are immaterial") {
  std::string messy =
      "# header\nautomaton A1 {\n\n  clocks   x;\n  init l0;\n  loc l0   inv x <= 2;\n"
      "  loc l1;\n  # note\n  edge l0->l1 when x>=1 sync s reset x;\n}\n"
      "automaton A2 { clocks y; init m0; loc m0; loc m1;\n"
      "  edge m0 -> m1 when y<2 sync s; }\n";
  CHECK(serialize(parse(messy)) == serialize(parse(kValid)));
}

TEST_CASE("parse errors carry positions and kinds") {
  CHECK_THROWS_AS(parse("automaton A1 {"), ParseError);
  CHECK_THROWS_AS(parse("nonsense"), SyntaxError);
  // Unknown clock in a guard.
  std::string bad1 = kValid;
  size_t p = bad1.find("when y < 2");
  bad1.replace(p, 10, "when q < 2");
  CHECK_THROWS_AS(parse(bad1), SemanticError);
  // Unknown location in init.
  std::string bad2 = kValid;
  p = bad2.find("init m0");
  bad2.replace(p, 7, "init zz");
  CHECK_THROWS_AS(parse(bad2), SemanticError);
  // Duplicate location name.
  std::string bad3 = kValid;
  p = bad3.find("loc m1;");
  bad3.replace(p, 7, "loc m0;");
  CHECK_THROWS_AS(parse(bad3), SemanticError);
  try {
    parse(bad1);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line >= 1);
    CHECK(e.col >= 1);
  }
}

TEST_CASE("difference constraints and copies need the synthesized pragma") {
  std::string diag = kValid;
  size_t p = diag.find("when x >= 1");
  diag.replace(p, 11, "when x - x >= 0");
  CHECK_THROWS_AS(parse(diag), SemanticError);
  CHECK(parse("pragma synthesized;\n" + diag).synthesized);

  std::string cp = kValid;
  p = cp.find("reset x");
  cp.replace(p, 7, "copy x := x");
  CHECK_THROWS_AS(parse(cp), SemanticError);
  Network n = parse("pragma synthesized;\n" + cp);
  CHECK(n.a1.edges[0].copies == std::vector<std::pair<int, int>>{{0, 0}});
  std::string round = serialize(n);
  CHECK(round.find("pragma synthesized;") == 0);
  CHECK(serialize(parse(round)) == round);
}

TEST_CASE("guard and invariant rendering") {
  Network n = parse(kValid);
  CHECK(guard_str(n.a1.edges[0].guard, n.clocks) == "x >= 1");
  CHECK(inv_str(n.a1.locations[0].inv, n.clocks) == "x <= 2");
  Guard g;
  g.atoms = {{0, Rel::Ge, 1}, {1, Rel::Lt, 2}};
  CHECK(guard_str(g, n.clocks) == "x >= 1 && y < 2");
}

TEST_CASE("difference constraints round-trip in the synthesized tier") {
  std::string text = "pragma synthesized;\n" + std::string(kValid);
  size_t p = text.find("when y < 2");
  text.replace(p, 10, "when y - x <= 1");
  Network n = parse(text);
  REQUIRE(n.a2.edges[0].guard.diags.size() == 1);
  CHECK(n.a2.edges[0].guard.diags[0] == DiagAtom{1, 0, Rel::Le, 1});
  std::string s = serialize(n);
  CHECK(s.find("y - x <= 1") != std::string::npos);
  CHECK(serialize(parse(s)) == s);
}

TEST_CASE("network DOT export shows both components") {
  Network n = load_fixture("fig2.nta");
  std::string dot = export_dot(n);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("cluster") != std::string::npos);
  CHECK(dot.find("p0") != std::string::npos);
  CHECK(dot.find("m0") != std::string::npos);
  CHECK(dot.find("s") != std::string::npos);
}
