#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gwtree/cli.hpp"

using namespace gwtree::cli;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_args(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int status = kExitUsage;
  try {
    status = run(parse_args(args), out, err);
  } catch (const UsageError& e) {
    err << e.what();
  }
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string w; in >> w;) v.push_back(w);
  return v;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run_args({"exact", "--property", "root1", "--lambda", "1"}).status == kExitOk);
  CHECK(run_args({"exact", "--property", "nonsense"}).status == kExitUsage);
  CHECK(run_args({"exact", "--lambda", "-1"}).status == kExitUsage);
  CHECK(run_args({"exact", "--lambda", "abc"}).status == kExitUsage);
  CHECK(run_args({"frobnicate"}).status == kExitUsage);
  CHECK(run_args({"exact", "--no-such-flag", "1"}).status == kExitUsage);
  CHECK(run_args({"decay", "--property", "root1", "--lambda", "1", "--k", "2:4:1"}).status == kExitUsage);
  CHECK(run_args({"lambertw", "--x", "-1"}).status == kExitUsage);
  // {X_1 = 0} at k = 1 is outside the disc majorant.
  CHECK(run_args({"disc", "--property", "size-lt:2", "--k", "1", "--lambda", "1"}).status == kExitNumeric);
  CHECK(run_args({"series", "--property", "root1", "--at", "3,0", "--nmax", "2"}).status == kExitNumeric);
}

TEST_CASE("sweep output") {
  const auto r = run_args({"sweep", "--property", "root1", "--lambda", "0.5:2:4", "--k", "1"});
  REQUIRE(r.status == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 6);
  CHECK(l[0].rfind("# gwtree sweep ", 0) == 0);
  CHECK(l[1] == "property,k,lambda,lower,upper,tail_mass");
  CHECK(l[2].rfind("root1,1,0.5,", 0) == 0);
  CHECK(l[5].rfind("root1,1,2,", 0) == 0);
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("survival reports zero at criticality") {
  const auto r = run_args({"survival", "--lambda", "1.0", "--format", "text"});
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("s = 0 ") != std::string::npos);
}

TEST_CASE("series coefficients are exact integers") {
  const auto r = run_args({"series", "--property", "true", "--k", "3", "--nmax", "40"});
  REQUIRE(r.status == kExitOk);
  const auto l = lines(r.out);
  CHECK(l.back() == "40,12157665459056928801");
}

TEST_CASE("Monte Carlo output repeats byte for byte") {
  const std::vector<std::string> args{"decay", "--property", "even1", "--lambda", "2", "--k", "2:10:4",
                                      "--samples", "30000", "--seed", "17", "--threads", "1"};
  const auto a = run_args(args);
  auto more = args;
  more.back() = "4";
  const auto b = run_args(more);
  REQUIRE(a.status == kExitOk);
  CHECK(a.out == b.out);
  const auto mc1 = run_args({"mc", "--property", "root1", "--samples", "20000", "--threads", "2"});
  const auto mc2 = run_args({"mc", "--property", "root1", "--samples", "20000", "--threads", "3"});
  CHECK(mc1.out == mc2.out);
}

TEST_CASE("header replays the run") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"decay", "--method", "complex", "--property", "even1", "--lambda", "2", "--k", "2:6:2"},
        std::vector<std::string>{"evenlevel", "--lambda", "1", "--k", "5:15:5", "--samples", "5000", "--seed", "3"},
        std::vector<std::string>{"exact", "--property", "flevel2:list:1,3", "--k", "4", "--truncation", "size"},
        std::vector<std::string>{"lambertw", "--x", "0.5,2"}}) {
    const auto first = run_args(args);
    REQUIRE(first.status == kExitOk);
    const auto header = lines(first.out).front();
    REQUIRE(header.rfind("# gwtree ", 0) == 0);
    auto replay_args = words(header.substr(9));
    const auto second = run_args(replay_args);
    CHECK(second.out == first.out);
  }
}

TEST_CASE("ranges") {
  CHECK(parse_lambda_range("1:2:3") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(parse_k_range("5:25:5") == std::vector<int>{5, 10, 15, 20, 25});
  CHECK_THROWS_AS(parse_k_range("0"), UsageError);
  CHECK_THROWS_AS(parse_lambda_range("2:1:3"), UsageError);
}
