// End-to-end checks of the compose binary: runs the installed subcommands
// against the shipped data files and inspects exit codes and output.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_compose(const std::string& args) {
  static int counter = 0;
  std::string tmp = "/tmp/compose_cli_" + std::to_string(++counter) + ".out";
  std::string cmd = std::string(COMPOSE_BIN) + " " + args + " > " + tmp + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult out;
  out.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(tmp);
  std::ostringstream buf;
  buf << in.rdbuf();
  out.output = buf.str();
  std::remove(tmp.c_str());
  return out;
}

std::string data(const std::string& name) {
  return std::string(COMPOSE_DATA_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("eval tile prints fiducial maps per component") {
  auto r = run_compose("eval --backend tile --registry " + data("tiles.json") + " " +
                       data("d.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "component 1 (fiducial 1): 1:(0,0) 2:(0,-1) 3:(1,-1) 4:(1,0) 5:(1,1)"));
  CHECK(contains(r.output, "component 2 (fiducial 6): 6:(0,0) 7:(1,0)"));
  CHECK(contains(r.output, "consistent: true"));
}

TEST_CASE("eval beam on the Penrose triangle is strict-fatal") {
  auto r = run_compose("eval --backend beam --registry " + data("beams.json") + " " +
                       data("penrose.term") + " --strict");
  CHECK(r.exit_code == 3);
  CHECK(contains(r.output, "possible: false"));

  SUBCASE("without --strict the exit code is 0") {
    auto soft = run_compose("eval --backend beam --registry " + data("beams.json") + " " +
                            data("penrose.term"));
    CHECK(soft.exit_code == 0);
    CHECK(contains(soft.output, "possible: false"));
  }
  SUBCASE("the square frame passes strict mode") {
    auto frame = run_compose("eval --backend beam --registry " + data("beams.json") + " " +
                             data("square_frame.term") + " --strict");
    CHECK(frame.exit_code == 0);
    CHECK(contains(frame.output, "possible: true"));
  }
}

TEST_CASE("eval circuit prints the scalar value") {
  auto r = run_compose("eval --backend circuit --registry " + data("circuit.json") +
                       " --tensors " + data("circuit_tensors.json") + " " + data("tri.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "value: 1480"));
}

TEST_CASE("strict tile evaluation flags inconsistent objects") {
  auto r = run_compose("eval --backend tile --registry " + data("tiles.json") + " " +
                       data("xy_conflict.term") + " --strict");
  CHECK(r.exit_code == 3);
  CHECK(contains(r.output, "consistent: false"));
}

TEST_CASE("orders reports count and independence") {
  auto r = run_compose("orders --max-nodes 4 --registry " + data("circuit.json") + " " +
                       data("tri.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "orders: 3"));
  CHECK(contains(r.output, "canonical-equal: true"));
  CHECK(contains(r.output, "order-independent: true"));

  SUBCASE("with a backend the states are compared too") {
    auto rb = run_compose("orders --registry " + data("circuit.json") + " --backend circuit" +
                          " --tensors " + data("circuit_tensors.json") + " " + data("tri.term"));
    CHECK(rb.exit_code == 0);
    CHECK(contains(rb.output, "states-equal: true"));
    CHECK(contains(rb.output, "order-independent: true"));
  }
  SUBCASE("the bound is enforced") {
    auto rbound = run_compose("orders --max-nodes 2 --registry " + data("circuit.json") + " " +
                              data("tri.term"));
    CHECK(rbound.exit_code == 1);
  }
}

TEST_CASE("canon output is deterministic") {
  std::string cmd = "canon --registry " + data("circuit.json") + " " + data("tri.term");
  auto r1 = run_compose(cmd);
  auto r2 = run_compose(cmd);
  CHECK(r1.exit_code == 0);
  CHECK(r1.output == r2.output);
  CHECK(contains(r1.output, "A^{a1 b2} B_{a1}^{c3} C_{b2 c3}"));
}

TEST_CASE("equiv decides alpha-equivalence") {
  std::ofstream("/tmp/compose_equiv_a.term") << "A^{a1 b2} B_{a1}^{c3} C_{b2 c3}\n";
  std::ofstream("/tmp/compose_equiv_b.term") << "C_{b7 c9} A^{a4 b7} B_{a4}^{c9}\n";
  std::ofstream("/tmp/compose_equiv_c.term") << "A^{a1} B_{a1}\n";
  auto eq = run_compose("equiv --registry " + data("circuit.json") +
                        " /tmp/compose_equiv_a.term /tmp/compose_equiv_b.term");
  CHECK(eq.exit_code == 0);
  CHECK(contains(eq.output, "equivalent: true"));
  auto ne = run_compose("equiv --registry " + data("circuit.json") +
                        " /tmp/compose_equiv_a.term /tmp/compose_equiv_c.term");
  CHECK(ne.exit_code == 0);
  CHECK(contains(ne.output, "equivalent: false"));
}

TEST_CASE("reverse re-describes a join") {
  auto r = run_compose("reverse --edge 1 --registry " + data("circuit.json") + " " +
                       data("tri.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "~a"));
}

TEST_CASE("prune drops the implied gap join") {
  auto r = run_compose("prune --keep a --rules " + data("rules_squares.json") +
                       " --registry " + data("squares.json") + " " + data("squares.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "A^{a1} B_{a1}^{a2} C_{a2}"));

  SUBCASE("pruning to the gap join fails") {
    auto bad = run_compose("prune --keep b --rules " + data("rules_squares.json") +
                           " --registry " + data("squares.json") + " " + data("squares.term"));
    CHECK(bad.exit_code == 1);
  }
}

TEST_CASE("render emits DOT") {
  auto r = run_compose("render --registry " + data("circuit.json") + " " + data("tri.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "digraph composite {"));
  CHECK(contains(r.output, "n0 -> n1 [label=\"a\"]"));

  SUBCASE("--out writes a file") {
    auto ro = run_compose("render --registry " + data("circuit.json") + " --out /tmp/compose_tri.dot " +
                          data("tri.term"));
    CHECK(ro.exit_code == 0);
    std::ifstream in("/tmp/compose_tri.dot");
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(contains(buf.str(), "digraph composite {"));
    std::remove("/tmp/compose_tri.dot");
  }
}

TEST_CASE("parse reports a summary and JSON carries the schema version") {
  auto r = run_compose("parse --registry " + data("tiles.json") + " " + data("d.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "objects: 7"));
  CHECK(contains(r.output, "joins: 6"));
  CHECK(contains(r.output, "components: 2"));

  auto rj = run_compose("parse --json --registry " + data("tiles.json") + " " + data("d.term"));
  CHECK(rj.exit_code == 0);
  CHECK(contains(rj.output, "\"schemaVersion\": 1"));
  CHECK(contains(rj.output, "\"nodes\""));
}

TEST_CASE("check accepts valid input and rejects bad input") {
  auto ok = run_compose("check --registry " + data("tiles.json") + " " + data("d.term"));
  CHECK(ok.exit_code == 0);
  CHECK(contains(ok.output, "ok"));

  std::ofstream("/tmp/compose_bad.term") << "T[1]^{x1} T[2]^{x1}\n";  // both superscript
  auto bad = run_compose("check --registry " + data("tiles.json") + " /tmp/compose_bad.term");
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.output, "error"));

  auto missing = run_compose("check --registry " + data("tiles.json") + " /tmp/no_such.term");
  CHECK(missing.exit_code == 1);
}

TEST_CASE("bipartite input evaluates in the described order") {
  std::ofstream("/tmp/compose_pair.bip")
      << "(T[1], T[2])@{x: T[1].right -> T[2].left}\n";
  auto r = run_compose("eval --backend tile --format bipartite --registry " +
                       data("tiles.json") + " /tmp/compose_pair.bip");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "1:(0,0) 2:(1,0)"));
  CHECK(contains(r.output, "consistent: true"));

  SUBCASE("the table example parses") {
    auto rt = run_compose("check --format bipartite --registry " + data("table.json") + " " +
                          data("table.bip"));
    CHECK(rt.exit_code == 0);
  }
}

TEST_CASE("eval --json embeds the backend state") {
  auto r = run_compose("eval --json --backend tile --registry " + data("tiles.json") + " " +
                       data("d.term"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "\"consistent\": true"));
  CHECK(contains(r.output, "\"fiducial\": 1"));
}
