// End-to-end checks of the installed command surface: exit codes, output
// artifacts, and the scan pipeline over on-disk PE fixtures.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pe_builder.hpp"
#include "rdet/dataset.hpp"
#include "rdet/model_io.hpp"
#include "rdet/textio.hpp"
#include "test_util.hpp"

using namespace rdet;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = std::string(RDET_CLI_PATH) + " " + args;
  cmd += stdout_file.empty() ? " >/dev/null" : " >" + stdout_file.string();
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2, operational errors exit 1") {
  CHECK(cli("") == 2);                       // no subcommand
  CHECK(cli("train") == 2);                  // missing --config
  CHECK(cli("train --config /no/such") == 2);  // path validation
  CHECK(cli("ingest --data /no/such.csv") == 2);
  CHECK(cli("nonsense") == 2);
  CHECK(cli("--help") == 0);

  testutil::TempDir tmp("cli_err");
  const fs::path csv = tmp.path() / "d.csv";
  write_csv(synth_generate(10, 1), csv);
  // Config that points at a dataset which vanishes before run time.
  const fs::path cfg = tmp.path() / "bad.cfg";
  write_file(cfg, "data = " + (tmp.path() / "gone.csv").string() + "\n");
  CHECK(cli("train --config " + cfg.string()) == 1);
  // Unknown config key is a usage error.
  const fs::path cfg2 = tmp.path() / "typo.cfg";
  write_file(cfg2, "data = " + csv.string() + "\nwibble = 3\n");
  CHECK(cli("train --config " + cfg2.string()) == 2);
}

TEST_CASE("synth -> ingest -> stats -> train -> evaluate -> predict flow") {
  testutil::TempDir tmp("cli_flow");
  const fs::path csv = tmp.path() / "synth.csv";
  CHECK(cli("synth --n 150 --seed 12 --out " + csv.string()) == 0);

  const fs::path ingest_kv = tmp.path() / "ingest.kv";
  CHECK(cli("ingest --data " + csv.string(), ingest_kv) == 0);
  const std::string kv = read_file(ingest_kv);
  CHECK(kv.find("validation.rows=300") != std::string::npos);
  CHECK(kv.find("validation.defects=0") != std::string::npos);

  const fs::path stats_dir = tmp.path() / "stats";
  CHECK(cli("stats --data " + csv.string() + " --out " + stats_dir.string()) == 0);
  CHECK(fs::exists(stats_dir / "corr.csv"));
  CHECK(fs::exists(stats_dir / "corr.svg"));

  const fs::path cfg = tmp.path() / "exp.cfg";
  write_file(cfg, "data = " + csv.string() + "\nmodel = forest\nforest.trees = 15\n" +
                      "seed = 4\nout = " + (tmp.path() / "run").string() + "\n");
  CHECK(cli("train --config " + cfg.string()) == 0);
  const fs::path model = tmp.path() / "run/model.rdet";
  REQUIRE(fs::exists(model));

  const fs::path eval_kv = tmp.path() / "eval.kv";
  CHECK(cli("evaluate --model " + model.string() + " --data " + csv.string() +
                " --out " + (tmp.path() / "eval").string(),
            eval_kv) == 0);
  CHECK(read_file(eval_kv).find("metrics.accuracy=1") != std::string::npos);
  CHECK(fs::exists(tmp.path() / "eval/pr.csv"));

  // Prediction over a label-free CSV.
  Dataset unlabeled = synth_generate(20, 9);
  unlabeled.labels.resize(0);
  const fs::path ul = tmp.path() / "unlabeled.csv";
  write_csv(unlabeled, ul);
  const fs::path pred_csv = tmp.path() / "pred.csv";
  CHECK(cli("predict --model " + model.string() + " --data " + ul.string(), pred_csv) == 0);
  const std::string pred = read_file(pred_csv);
  CHECK(pred.find("id,predicted_label,positive_score") != std::string::npos);
  CHECK(pred.find("mal_0.exe,0,") != std::string::npos);

  // Corrupt model file: operational failure.
  std::string damaged = read_file(model);
  damaged[damaged.size() / 2] ^= 0x01;
  const fs::path bad_model = tmp.path() / "bad.rdet";
  write_file(bad_model, damaged);
  CHECK(cli("evaluate --model " + bad_model.string() + " --data " + csv.string()) == 1);

  // Schema that disagrees with the model's training columns.
  const fs::path odd_schema = tmp.path() / "odd.schema";
  write_file(odd_schema, "Entropy numeric\nBenign label\n");
  CHECK(cli("evaluate --model " + model.string() + " --data " + csv.string() +
            " --schema " + odd_schema.string()) == 1);
}

TEST_CASE("determinism: identical runs produce identical machine outputs") {
  testutil::TempDir tmp("cli_det");
  const fs::path csv = tmp.path() / "synth.csv";
  CHECK(cli("synth --n 80 --seed 3 --out " + csv.string()) == 0);
  const fs::path cfg = tmp.path() / "exp.cfg";
  write_file(cfg, "data = " + csv.string() + "\nmodel = gbdt\ngbdt.rounds = 8\nseed = 1\n" +
                      "out = " + (tmp.path() / "a").string() + "\n");
  const fs::path kv_a = tmp.path() / "a.kv";
  const fs::path kv_b = tmp.path() / "b.kv";
  CHECK(cli("train --config " + cfg.string(), kv_a) == 0);
  CHECK(cli("train --config " + cfg.string() + " --out " + (tmp.path() / "b").string(),
            kv_b) == 0);
  CHECK(read_file(tmp.path() / "a/model.rdet") == read_file(tmp.path() / "b/model.rdet"));
  // Everything except the self-referential output path matches.
  std::string a = read_file(kv_a), b = read_file(kv_b);
  const auto strip = [](std::string s, const std::string& key) {
    std::string out;
    for (std::string_view line : split_lines(s))
      if (!line.starts_with(key)) {
        out.append(line);
        out.push_back('\n');
      }
    return out;
  };
  // train.seconds is wall-clock metadata; train.model embeds the out dir.
  a = strip(strip(a, "train.model"), "train.seconds");
  b = strip(strip(b, "train.model"), "train.seconds");
  CHECK(a == b);
}

TEST_CASE("scan: verdicts per file, error rows, feature CSV feeds training") {
  testutil::TempDir tmp("cli_scan");
  const fs::path bin_dir = tmp.path() / "bins";
  fs::create_directories(bin_dir);

  // Legitimate-pattern image.
  pebuild::BuildSpec legit;
  legit.fields.machine = 0x8664;
  legit.fields.number_of_sections = 3;
  legit.fields.major_image_version = 6;
  legit.fields.major_os_version = 10;
  legit.fields.size_of_stack_reserve = 0x100000;
  legit.fields.export_rva = 0x2000;
  legit.fields.export_size = 0x150;
  legit.fields.debug_rva = 0x2200;
  legit.fields.debug_size = 0x54;
  legit.fields.iat_rva = 4096;
  legit.fields.resource_size = 0x400;
  write_bytes(bin_dir / "good.exe", pebuild::build_pe(legit));

  // Malware-pattern image: zeroed markers.
  pebuild::BuildSpec mal;
  mal.fields.machine = 0x14C;
  mal.fields.number_of_sections = 2;
  mal.pe32plus = false;
  mal.fields.bitcoin_address_count = 2;
  write_bytes(bin_dir / "bad.exe", pebuild::build_pe(mal));

  // Not a PE at all.
  write_file(bin_dir / "notes.txt", "just text\n");

  const fs::path out_csv = tmp.path() / "scanned.csv";
  const fs::path verdicts = tmp.path() / "verdicts.txt";
  CHECK(cli("scan " + bin_dir.string() + " --out " + out_csv.string(), verdicts) == 0);
  const std::string v = read_file(verdicts);
  CHECK(v.find("good.exe\tlegitimate") != std::string::npos);
  CHECK(v.find("bad.exe\tmalware") != std::string::npos);
  CHECK(v.find("notes.txt\terror") != std::string::npos);

  // The feature CSV uses the training schema and loads cleanly.
  const Dataset scanned = load_csv(out_csv, FeatureSchema::kaggle_default());
  CHECK(scanned.size() == 2);
  auto [c0, c1] = class_balance(scanned);
  CHECK(c0 == 1);
  CHECK(c1 == 1);
  const int bitcoin = *scanned.schema.feature_index("BitcoinAddresses");
  CHECK((scanned.features.col(bitcoin).maxCoeff() == 2.0));

  // Scanning with a trained model instead of the heuristic.
  const fs::path train_csv = tmp.path() / "train.csv";
  CHECK(cli("synth --n 100 --seed 5 --out " + train_csv.string()) == 0);
  const fs::path cfg = tmp.path() / "exp.cfg";
  write_file(cfg, "data = " + train_csv.string() +
                      "\nmodel = forest\nforest.trees = 9\nseed = 2\nout = " +
                      (tmp.path() / "run").string() + "\n");
  CHECK(cli("train --config " + cfg.string()) == 0);
  CHECK(cli("scan " + bin_dir.string() + " --model " +
            (tmp.path() / "run/model.rdet").string()) == 0);
}

}  // TEST_SUITE
