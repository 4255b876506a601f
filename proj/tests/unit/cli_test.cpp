#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <algorithm>
#include <numeric>
#include <string>
#include <unistd.h>

#include "bst/ingest.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace bst;

namespace {

struct Run {
  int code;
  std::string out;
};

class Workdir {
public:
  Workdir() : dir_(fs::temp_directory_path() / ("bst_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Run run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string cmd = std::string(BST_CLI_PATH) + " " + args + " > " + out + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The ids column of CSV query output.
std::vector<std::string> id_column(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells.size() > 4 ? cells[4] : "");
  }
  return out;
}

} // namespace

TEST_CASE("gen is deterministic and validates its arguments") {
  Workdir w;
  CHECK(w.run("gen --n 1000 -b 2 -L 16 --seed 7 -o " + w.path("a.bsk")).code == 0);
  CHECK(w.run("gen --n 1000 -b 2 -L 16 --seed 7 -o " + w.path("b.bsk")).code == 0);
  CHECK(slurp(w.path("a.bsk")) == slurp(w.path("b.bsk")));
  CHECK(w.run("gen -b 9 -o " + w.path("c.bsk")).code == 2);
  CHECK(w.run("gen --kind spiral -o " + w.path("c.bsk")).code == 2);
  CHECK(w.run("gen").code == 2);
  CHECK(w.run("frobnicate").code == 2);
}

TEST_CASE("build and query the worked dataset") {
  Workdir w;
  write_sketches(test::worked_dataset(), fs::path(w.path("worked.bsk")));
  SketchDataset queries(SketchParams(2, 5));
  queries.push_back(test::sym("aaaaa"));
  queries.push_back(test::sym("dbbba"));
  write_sketches(queries, fs::path(w.path("q.bsk")));

  const auto build = w.run("build --input " + w.path("worked.bsk") + " --index " + w.path("worked.bst"));
  REQUIRE(build.code == 0);
  CHECK(build.out.find("level level=5 nodes=9") != std::string::npos);

  const auto q = w.run("query --index " + w.path("worked.bst") + " --queries " + w.path("q.bsk") + " --tau 1 --tau 0");
  REQUIRE(q.code == 0);
  CHECK(q.out.find("result query=1 tau=1 count=3 ids=2 3 6 ") != std::string::npos);
  CHECK(q.out.find("result query=2 tau=0 count=0 ids= ") != std::string::npos);

  const auto json = w.run("query --index " + w.path("worked.bst") + " --queries " + w.path("q.bsk") +
                          " --tau 1 --format json-lines");
  CHECK(json.out.find("\"ids\":[2,3,6]") != std::string::npos);

  CHECK(w.run("build --input " + w.path("worked.bsk") + " --index " + w.path("x.bst") + " --lambda 1.5").code == 2);
  CHECK(w.run("build --input " + w.path("worked.bsk") + " --index " + w.path("x.bst") + " --blocks 2").code == 2);
  CHECK(w.run("build --input " + w.path("worked.bsk") + " --index " + w.path("x.bst") + " --dense-level 3").code == 2);
  CHECK(w.run("build --input " + w.path("missing.bsk") + " --index " + w.path("x.bst")).code == 3);

  const auto mi = w.run("build --input " + w.path("worked.bsk") + " --index " + w.path("mi.bst") +
                        " --variant mi-bst --blocks 2");
  REQUIRE(mi.code == 0);
  CHECK(mi.out.find("trie block=1 ") != std::string::npos);
  CHECK(mi.out.find("trie block=2 ") != std::string::npos);
  CHECK(mi.out.find("trie block=3 ") == std::string::npos);
}

TEST_CASE("query output agrees across variants") {
  Workdir w;
  REQUIRE(w.run("gen --kind planted --n 3000 -b 2 -L 16 --clusters 100 --radius 3 --seed 5 -o " +
                w.path("d.bsk")).code == 0);
  REQUIRE(w.run("gen --n 40 -b 2 -L 16 --seed 6 -o " + w.path("q.bsk")).code == 0);
  std::vector<std::string> columns;
  for (const char* v : {"si-bst", "mi-bst", "sih", "mih", "scan"}) {
    const std::string idx = w.path(std::string(v) + ".bst");
    REQUIRE(w.run("build --input " + w.path("d.bsk") + " --index " + idx + " --variant " + v).code == 0);
    const auto r = w.run("query --index " + idx + " --queries " + w.path("d.bsk") +
                         " --tau 0 --tau 2 --tau 4 --format csv --threads 2");
    REQUIRE(r.code == 0);
    const auto ids = id_column(r.out);
    CHECK(ids.size() == 9000);
    columns.push_back(r.out.empty() ? "" : std::accumulate(ids.begin(), ids.end(), std::string(),
                                                           [](std::string a, const std::string& b) { return a + b + "\n"; }));
  }
  for (std::size_t i = 1; i < columns.size(); ++i) CHECK(columns[i] == columns[0]);

  // Parameter mismatch between index and queries is a data error.
  REQUIRE(w.run("gen --n 5 -b 2 -L 12 -o " + w.path("short.bsk")).code == 0);
  CHECK(w.run("query --index " + w.path("scan.bst") + " --queries " + w.path("short.bsk")).code == 3);
  CHECK(w.run("query --index " + w.path("q.bsk") + " --queries " + w.path("q.bsk")).code == 3);
}

TEST_CASE("planted members are found from their centers") {
  Workdir w;
  REQUIRE(w.run("gen --kind planted --n 1000 -b 4 -L 32 --clusters 10 --radius 1 --seed 3 -o " +
                w.path("p.bsk")).code == 0);
  const auto ds = read_sketches(fs::path(w.path("p.bsk")));
  SketchDataset centers(ds.params());
  for (std::size_t c = 0; c < 10; ++c) centers.push_back(ds.row(c));
  write_sketches(centers, fs::path(w.path("c.bsk")));
  REQUIRE(w.run("build --input " + w.path("p.bsk") + " --index " + w.path("p.bst") + " --variant scan").code == 0);
  const auto r = w.run("query --index " + w.path("p.bst") + " --queries " + w.path("c.bsk") +
                       " --tau 1 --format json-lines");
  REQUIRE(r.code == 0);
  // Every row belongs to exactly one center and lies within distance 1.
  std::size_t total = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find("\"count\":");
    total += std::stoul(line.substr(pos + 8));
  }
  CHECK(total >= 1000);
}

TEST_CASE("bench") {
  Workdir w;
  const auto predict = w.run("bench --predict --format csv");
  REQUIRE(predict.code == 0);
  CHECK(predict.out.rfind("record,bits,length,n,tau,m,policy,signatures,", 0) == 0);
  // Header plus 2 bit widths x 5 thresholds x 3 block counts.
  CHECK(std::count(predict.out.begin(), predict.out.end(), '\n') == 31);

  REQUIRE(w.run("gen --n 20000 -b 4 -L 32 --seed 1 -o " + w.path("u.bsk")).code == 0);
  const auto bench = w.run("bench --input " + w.path("u.bsk") +
                           " --variant si-bst --variant scan --tau 1 --tau 2 --sample 50");
  REQUIRE(bench.code == 0);
  CHECK(bench.out.find("bench,si-bst,1,") != std::string::npos);
  CHECK(bench.out.find("bench,scan,2,") != std::string::npos);
  CHECK(w.run("bench --input " + w.path("u.bsk") + " --variant si-bst --blocks 2").code == 2);
  CHECK(w.run("bench --input " + w.path("u.bsk") + " --tau 33").code == 2);
  CHECK(w.run("bench").code == 2);
}

TEST_CASE("minhash command") {
  Workdir w;
  {
    std::ofstream t(w.path("tokens.txt"));
    t << "1 2 3 4 5\n1 2 3 4 6\nff ee dd\n";
  }
  REQUIRE(w.run("minhash --input " + w.path("tokens.txt") + " -o " + w.path("m.bsk") + " -b 2 -L 64").code == 0);
  const auto ds = read_sketches(fs::path(w.path("m.bsk")));
  CHECK(ds.size() == 3);
  CHECK(ds.params().length == 64);
  {
    std::ofstream t(w.path("bad.txt"));
    t << "1 2 xyz\n";
  }
  CHECK(w.run("minhash --input " + w.path("bad.txt") + " -o " + w.path("m2.bsk")).code == 3);
}
