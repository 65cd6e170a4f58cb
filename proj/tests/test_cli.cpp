#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Run the cs binary with `args`; stderr is discarded.
Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + std::string(CS_BINARY) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

}  // namespace

TEST_CASE("cli: trivial theta") {
  auto r = run("theta --order 0 --p 0");
  CHECK(r.status == 0);
  CHECK(r.out == "1\n");
}

TEST_CASE("cli: A2 theta at the example base point") {
  auto r = run("theta --seed a2 --order 4 --p 0,-1 --q 17/20,3/2");
  CHECK(r.status == 0);
  CHECK(r.out == "z^(-1,-1) + z^(-1,0) + z^(0,-1)\n");
}

TEST_CASE("cli: json output parses and repeats byte for byte") {
  auto a = run("theta --seed annulus --order 6 --p 1,-1,0,0 --format json");
  auto b = run("--format json theta --seed annulus --order 6 --p 1,-1,0,0");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["command"] == "theta");
  CHECK(j["result"]["theta"]["terms"].size() > 1);
}

TEST_CASE("cli: scatter dump") {
  auto r = run("scatter --seed a2 --order 3");
  CHECK(r.status == 0);
  CHECK(r.out.find("walls=3") != std::string::npos);
  CHECK(r.out.find("support=ray(1,-1) f=1 + (t)x^1") != std::string::npos);
}

TEST_CASE("cli: theta-mult on the annulus") {
  auto r = run("theta-mult --seed annulus --order 6 --ps '0,1,0,0;1,-1,0,0'");
  CHECK(r.status == 0);
  CHECK(r.out == "(t^2)*theta(-1,0,1,1) + (t^(-2))*theta(1,0,0,0)\n");
}

TEST_CASE("cli: mutate, bracelet, shear and fold") {
  auto m = run("mutate --seed a2 --path 1,2");
  CHECK(m.status == 0);
  CHECK(m.out.find("A[2] = z^(-1,-1) + z^(-1,0) + z^(0,-1)") != std::string::npos);

  auto b = run("bracelet --surface annulus --curve 'loop: [(g1,R),(g2,L)]' --pstar");
  CHECK(b.status == 0);
  CHECK(b.out.find("z^(1,-1,0,0)") != std::string::npos);

  auto s = run("shear --surface annulus --curve 'arc: start{boundary} [(b1,L),(g2,L),(g1,R),(g2,R),(b2)] end{boundary}'");
  CHECK(s.status == 0);
  CHECK(s.out.find("shear: (-1,0,1/2,1/2)") != std::string::npos);

  auto f = run("fold --seed cyclic-a3-prin --partition \"1,2,3;1',2',3'\" --project-order 6 --p -3,0");
  CHECK(f.status == 0);
  CHECK(f.out.find("omega_bar_circ: [[0,3],[-3,0]]") != std::string::npos);
  CHECK(f.out.find("f=1 + (1)x^1 + (1)x^2") != std::string::npos);
}

TEST_CASE("cli: verify suites") {
  auto r = run("verify a2");
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(run("verify torus").status == 0);
}

TEST_CASE("cli: exit codes for bad input") {
  CHECK(run("").status == 2);
  CHECK(run("theta --seed a2 --p 1,x").status == 2);
  CHECK(run("theta --seed a2 --p 1,2,3").status == 2);
  CHECK(run("theta --seed no-such-seed --p 0,1").status == 2);
  CHECK(run("verify nonsense").status == 2);
  CHECK(run("scatter --seed a2 --order 9", "CS_MAX_ORDER=4").status == 2);
  CHECK(run("scatter --seed a2 --order 3", "CS_MAX_ORDER=4").status == 0);
  // Overlapping parts are a computation error, not a parse error.
  CHECK(run("fold --seed cyclic-a3-prin --partition '1,2;2,3'").status == 1);
}

TEST_CASE("cli: seed files") {
  std::string path = "cli_test_seed.json";
  {
    std::ofstream out(path);
    out << R"({"labels": ["a", "b"], "omega": [[0, 1], [-1, 0]], "lambda": [[0, 1], [-1, 0]]})";
  }
  auto r = run("theta --seed " + path + " --order 4 --p 0,-1 --q 17/20,3/2");
  CHECK(r.status == 0);
  CHECK(r.out == "z^(-1,-1) + z^(-1,0) + z^(0,-1)\n");
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK(run("theta --seed " + path + " --p 0,1").status == 2);
  std::remove(path.c_str());
}
