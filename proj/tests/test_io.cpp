#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gmnl/io.hpp"

using namespace gmnl;

TEST_CASE("graph text round trip and built-in names", "[io]") {
  std::istringstream in("0 1\n0 2\n1 2  # closing edge\n");
  const NetworkGraph g = read_graph(in);
  CHECK(g.parties() == 3);
  CHECK(g.edges().size() == 3);
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream back(out.str());
  CHECK(read_graph(back).edges() == g.edges());

  CHECK(graph_from_spec_string("triangle").parties() == 3);
  CHECK(graph_from_spec_string("star:4").parties() == 5);
  CHECK(graph_from_spec_string("path:4").edges().size() == 3);
  CHECK(graph_from_spec_string("complete:4").edges().size() == 6);
  CHECK_THROWS_AS(graph_from_spec_string("/no/such/file"), InputError);
  std::istringstream bad("0\n");
  CHECK_THROWS_AS(read_graph(bad), InputError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_graph(empty), InputError);
}

TEST_CASE("state container round trip is bit exact", "[io]") {
  const DensityOperator rho = random_density({2, 3}, 42);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_state(buf, rho);
  const DensityOperator back = read_state(buf);
  CHECK(back.dims() == rho.dims());
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);

  // Truncated payload is rejected.
  std::string bytes = buf.str();
  std::stringstream cut(std::ios::in | std::ios::out | std::ios::binary);
  buf.seekg(0);
  write_state(cut, rho);
  std::string full = cut.str();
  std::istringstream trunc(full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(read_state(trunc), InputError);
}

TEST_CASE("strategy text round trip", "[io]") {
  const KVStrategy mw = KVStrategy::max_weight(2);
  std::ostringstream out;
  write_strategy(out, mw);
  CHECK(out.str().find("0000 -> 0011") != std::string::npos);
  CHECK(out.str().find("1000 -> 1011") != std::string::npos);
  std::istringstream in(out.str());
  const KVStrategy back = read_strategy(in);
  CHECK(back.table() == mw.table());

  std::istringstream bad("0000 0011\n");
  CHECK_THROWS_AS(read_strategy(bad), InputError);
  std::istringstream stray("0000 -> 0001\n");  // choice outside the orbit
  CHECK_THROWS_AS(read_strategy(stray), InputError);
}

TEST_CASE("score CSV row", "[io]") {
  CHECK(score_csv_header() == "value,std_error,samples,method");
  CHECK(score_csv_row(ScoreEstimate::exact(0.5625)) == "0.5625,0,0,exact");
  const std::string row = score_csv_row(ScoreEstimate::monte_carlo(0.5, 0.01, 1000));
  CHECK(row == "0.5,0.01,1000,monte-carlo");
}

TEST_CASE("behavior CSV round trip", "[io]") {
  const Behavior b = Behavior::deterministic({2, 2}, {2, 2}, [](int party, int x) {
    return party == 0 ? x : 1 - x;
  });
  std::ostringstream out;
  write_behavior(out, b);
  std::istringstream in(out.str());
  const Behavior back = read_behavior(in);
  CHECK(back.inputs().sizes() == b.inputs().sizes());
  for (std::size_t xf = 0; xf < b.inputs().total(); ++xf)
    for (std::size_t af = 0; af < b.outputs().total(); ++af)
      CHECK(back.prob(xf, af) == b.prob(xf, af));
}

TEST_CASE("game CSV round trip preserves the brute-forced bound", "[io]") {
  std::ostringstream out;
  write_game(out, chsh());
  std::istringstream in(out.str());
  const BellGame back = read_game(in);
  CHECK(back.num_x() == 2);
  CHECK(local_bound_bruteforce(back).value == 0.75);  // doubles survive the trip
  CHECK_FALSE(back.has_exact());  // text round trip drops the exact tables
}

TEST_CASE("double formatting round-trips", "[io]") {
  for (double v : {0.1, 1.0 / 3.0, 0.6299605249474366, 1e-300, 0.0}) {
    CHECK(std::stod(fmt_double(v)) == v);
  }
}
