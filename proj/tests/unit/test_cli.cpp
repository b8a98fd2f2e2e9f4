#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "embisim/cli/commands.hpp"
#include "embisim/cli/graph_directory.hpp"
#include "embisim/core/label_dict.hpp"
#include "test_support.hpp"

using namespace embisim;
using namespace embisim::cli;
namespace et = embisim::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden(EMBISIM_GOLDEN_DIR);

RunConfig small_config() {
  RunConfig c;
  c.budget = et::small_budget(16);
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Cli {
  Cli() { ingest(kGolden / "fig2.nodes", kGolden / "fig2.edges"); }

  IngestSummary ingest(const fs::path& nodes, const fs::path& edges) {
    return cmd_ingest(nodes, edges, dir, true, cfg, err);
  }
  int build(std::uint32_t k, bool overwrite = false) { return cmd_build(dir, k, overwrite, cfg, out, err); }
  int validate(std::optional<std::uint32_t> k = std::nullopt) { return cmd_validate(dir, k, cfg, out); }
  int update(UpdateKind kind, const std::string& text, std::uint32_t new_k = 0) {
    const fs::path p = tmp.path() / "update.txt";
    write_file(p, text);
    return cmd_update(dir, kind, p, new_k, cfg, out, err);
  }
  nlohmann::json meta() { return nlohmann::json::parse(slurp(dir / "meta.json")); }

  et::TempDir tmp;
  fs::path dir = tmp.path() / "g";
  RunConfig cfg = small_config();
  std::ostringstream out, err;
};

int run_tool(const std::string& args, std::string* output = nullptr) {
  et::TempDir tmp;
  const fs::path log = tmp.path() / "out.txt";
  const std::string cmd = std::string(EMBISIM_TOOL) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = slurp(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Ingest, SmallGraph) {
  Cli c;
  const auto s = c.ingest(kGolden / "fig2.nodes", kGolden / "fig2.edges");
  EXPECT_EQ(s.nodes, 6u);
  EXPECT_EQ(s.edges, 7u);
  EXPECT_EQ(s.labels, 4u);
  EXPECT_EQ(s.duplicates_removed, 0u);
  const auto m = c.meta();
  EXPECT_EQ(m.at("nodes").at("record_count"), 6);
  EXPECT_FALSE(m.contains("history"));
  const auto dict = LabelDictionary::load(c.dir / m.at("labels").get<std::string>());
  EXPECT_EQ(dict.name(LabelId{0}), "M");
  EXPECT_EQ(dict.name(LabelId{3}), "w");
}

TEST(Ingest, DuplicateEdgesAreDroppedWithWarning) {
  Cli c;
  write_file(c.tmp.path() / "e", "1\tl\t2\n1\tl\t2\n2\tl\t1\n");
  write_file(c.tmp.path() / "n", "1\tA\n2\n");
  const auto s = c.ingest(c.tmp.path() / "n", c.tmp.path() / "e");
  EXPECT_EQ(s.edges, 2u);
  EXPECT_EQ(s.duplicates_removed, 1u);
  EXPECT_NE(c.err.str().find("duplicate"), std::string::npos);
  EXPECT_EQ(c.meta().at("duplicate_edges_removed"), 1);
}

TEST(Ingest, DanglingEndpointNamesLine) {
  Cli c;
  write_file(c.tmp.path() / "e", "1\tl\t2\n1\tl\t9\n");
  write_file(c.tmp.path() / "n", "1\tA\n2\tA\n");
  try {
    c.ingest(c.tmp.path() / "n", c.tmp.path() / "e");
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("9"), std::string::npos) << e.what();
  }
}

TEST(Ingest, DuplicateNodeIsRejected) {
  Cli c;
  write_file(c.tmp.path() / "e", "");
  write_file(c.tmp.path() / "n", "1\tA\n1\tB\n");
  EXPECT_THROW(c.ingest(c.tmp.path() / "n", c.tmp.path() / "e"), InputError);
}

TEST(Ingest, RefusesExistingDirectoryWithoutForce) {
  Cli c;
  EXPECT_THROW(cmd_ingest(kGolden / "fig2.nodes", kGolden / "fig2.edges", c.dir, false, c.cfg, c.err), InputError);
}

TEST(Build, WritesHistoryAndValidates) {
  Cli c;
  EXPECT_EQ(c.build(2), kExitOk);
  EXPECT_NE(c.out.str().find("iteration,partition_count"), std::string::npos);
  const auto m = c.meta();
  EXPECT_EQ(m.at("k"), 2);
  EXPECT_EQ(m.at("history").at("record_count"), 6);
  EXPECT_EQ(c.validate(), kExitOk);
  EXPECT_NE(c.out.str().find("PASS"), std::string::npos);
  EXPECT_THROW(c.build(2), InputError);
  EXPECT_EQ(c.build(3, true), kExitOk);
  EXPECT_EQ(c.meta().at("k"), 3);
}

TEST(Build, OnlyReferencedFilesRemain) {
  Cli c;
  c.build(2);
  c.build(4, true);
  c.update(UpdateKind::add_edges, "6\tl\t5\n");
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(c.dir)) names.insert(e.path().filename().string());
  names.erase("scratch");  // emptied on every open
  const auto m = c.meta();
  std::set<std::string> want{"meta.json", "lock", "store", m.at("labels"), m.at("names").at("file"),
                             m.at("nodes").at("file"), m.at("edges_st").at("file"), m.at("edges_ts").at("file"),
                             m.at("history").at("file")};
  EXPECT_EQ(names, want);
  std::size_t stores = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(c.dir / "store")) ++stores;
  EXPECT_EQ(stores, 1u);
}

TEST(Validate, CorruptedPidIsReported) {
  Cli c;
  c.build(2);
  const auto m = c.meta();
  const fs::path hist = c.dir / m.at("history").at("file").get<std::string>();
  const std::size_t w = m.at("history").at("record_width");
  // Put node 3 (row 2) into node 1's level-1 block.
  std::fstream f(hist, std::ios::in | std::ios::out | std::ios::binary);
  std::uint64_t v = 0;
  f.seekg(0 * w + 12 + 8);
  f.read(reinterpret_cast<char*>(&v), 8);
  f.seekp(2 * w + 12 + 8);
  f.write(reinterpret_cast<const char*>(&v), 8);
  f.close();
  c.out.str("");
  EXPECT_EQ(c.validate(), kExitMismatch);
  EXPECT_NE(c.out.str().find("FAIL"), std::string::npos) << c.out.str();
}

TEST(Update, SequenceStaysValid) {
  Cli c;
  c.build(2);
  EXPECT_EQ(c.update(UpdateKind::add_edges, "6\tl\t5\n"), kExitOk);
  EXPECT_NE(c.out.str().find("level,checked_nodes"), std::string::npos);
  EXPECT_EQ(c.validate(), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::add_nodes, "7\tP\n8\tQ\n"), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::add_edges, "8\tl\t7\n2\tz\t8\n"), kExitOk);
  EXPECT_EQ(c.validate(), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::del_edges, "6\tl\t5\n"), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::set_k, "", 1), kExitOk);
  EXPECT_EQ(c.validate(), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::set_k, "", 4), kExitOk);
  EXPECT_EQ(c.update(UpdateKind::del_nodes, "2\n"), kExitOk);
  EXPECT_EQ(c.validate(), kExitOk);
  EXPECT_EQ(c.meta().at("nodes").at("record_count"), 7);
}

TEST(Update, RejectsBadInputWithoutChanges) {
  Cli c;
  c.build(2);
  const std::string before = slurp(c.dir / "meta.json");
  EXPECT_THROW(c.update(UpdateKind::add_edges, "1\tl\t99\n"), InputError);
  EXPECT_THROW(c.update(UpdateKind::del_edges, "6\tl\t5\n"), InputError);
  EXPECT_THROW(c.update(UpdateKind::add_nodes, "1\tM\n"), InputError);
  EXPECT_THROW(c.update(UpdateKind::del_nodes, "nope\n"), InputError);
  EXPECT_EQ(slurp(c.dir / "meta.json"), before);
  EXPECT_EQ(c.validate(), kExitOk);
}

TEST(Update, NeedsBuild) {
  Cli c;
  EXPECT_THROW(c.update(UpdateKind::add_edges, "6\tl\t5\n"), InputError);
}

TEST(Stats, ReportsCountsAndPartitions) {
  Cli c;
  c.build(2);
  c.out.str("");
  EXPECT_EQ(cmd_stats(c.dir, c.cfg, c.out), kExitOk);
  const std::string s = c.out.str();
  EXPECT_NE(s.find("node_count: 6"), std::string::npos) << s;
  EXPECT_NE(s.find("edge_count: 7"), std::string::npos) << s;
  EXPECT_NE(s.find("partition_count[2]: 5"), std::string::npos) << s;
}

TEST(Tool, ExitCodes) {
  et::TempDir tmp;
  const std::string g = (tmp.path() / "g").string();
  const std::string golden = kGolden.string();
  std::string out;
  EXPECT_EQ(run_tool("ingest --nodes " + golden + "/fig2.nodes --edges " + golden + "/fig2.edges --out " + g), 0);
  EXPECT_EQ(run_tool("--table-buffer 64KiB --store-buffer 64KiB build " + g + " -k 2", &out), 0) << out;
  EXPECT_EQ(run_tool("build " + g + " -k 2"), 2);
  EXPECT_EQ(run_tool("validate " + g, &out), 0) << out;
  EXPECT_EQ(run_tool("stats " + g), 0);
  EXPECT_EQ(run_tool("frobnicate"), 2);
  EXPECT_EQ(run_tool("build " + (tmp.path() / "missing").string() + " -k 1"), 2);
  EXPECT_EQ(run_tool("--table-buffer 100 build " + g + " -k 2 --overwrite"), 2);
  EXPECT_EQ(run_tool("generate dworst -n 4 --out " + (tmp.path() / "w").string(), &out), 0);
  EXPECT_NE(out.find("insertion_edge: 0 y 4"), std::string::npos) << out;
  EXPECT_EQ(run_tool("generate random -n 3 -m 50 --out " + (tmp.path() / "r").string()), 2);
}
