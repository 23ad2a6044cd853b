// ccmt: builds and scores complexity-controlled translation corpora.
//
// Subcommands:
//   align          align graded article families via pivot translations
//   build-dataset  construct multitask training samples with grade tokens
//   score          BLEU / SARI / PCC / adjacency report for system output
//   stats          corpus statistics tables from aligned segment pairs
//   grade          ARI reading grades for text lines or segment pairs

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccmt/align.hpp"
#include "ccmt/common.hpp"
#include "ccmt/corpus.hpp"
#include "ccmt/dataset.hpp"
#include "ccmt/metrics.hpp"
#include "ccmt/pivot.hpp"
#include "ccmt/readability.hpp"

namespace fs = std::filesystem;
using namespace ccmt;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string log_level = "info";
};

void run_indexed(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(threads, static_cast<int>(n)); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// --- align -------------------------------------------------------------------

struct AlignArgs {
  std::string families_path;
  std::string pivots;
  AlignerParams params;
  double min_score = 0.0;
  std::string out_path;
  std::string dump_sim_dir;
};

int cmd_align(const AlignArgs& args, const GlobalOptions& global) {
  auto articles = load_articles(args.families_path);
  auto families = group_families(articles);
  args.params.validate();
  PivotProviderConfig pivot_cfg = PivotProviderConfig::from_location(args.pivots);

  std::vector<std::vector<SegmentPair>> per_family(families.size());
  run_indexed(families.size(), global.threads, [&](std::size_t i) {
    const ArticleFamily& family = families[i];
    std::map<std::string, PivotDocument> pivots;
    for (const auto& [key, article] : family.versions)
      if (key.language == Language::es)
        pivots.emplace(article.id, fetch_pivot(pivot_cfg, article));
    per_family[i] = align_family(family, pivots, args.params);

    if (!args.dump_sim_dir.empty()) {
      fs::create_directories(args.dump_sim_dir);
      for (const auto& [src_key, src] : family.versions) {
        if (src_key.language != Language::es) continue;
        const PivotDocument& pivot = pivots.at(src.id);
        for (const auto& [tgt_key, tgt] : family.versions) {
          if (tgt_key.language != Language::en) continue;
          SimilarityMatrix m = paragraph_similarity(pivot.paragraphs, doc_view(tgt), args.params);
          std::ofstream os(fs::path(args.dump_sim_dir) /
                           (family.slug + "." + src.id + "-" + tgt.id + ".tsv"));
          write_matrix_tsv(m, os);
        }
      }
    }
  });

  std::vector<SegmentPair> pairs;
  for (auto& fam_pairs : per_family)
    for (auto& p : fam_pairs)
      if (p.score >= args.min_score) pairs.push_back(std::move(p));
  write_jsonl(pairs, args.out_path);

  std::cerr << "pairs: " << pairs.size() << "\n";
  for (const auto& [grades, count] : grade_pair_matrix(pairs))
    std::cerr << "grade " << grades.first << "->" << grades.second << ": " << count << "\n";
  return 0;
}

// --- build-dataset -----------------------------------------------------------

struct BuildArgs {
  std::string pairs_path;
  std::string mono_pairs_path;
  std::vector<std::string> opus_paths;  // SRC TGT
  std::string tasks = "cmt,mt,simplify";
  std::string grade_source = "gold";
  std::string split = "0.9,0.05,0.05";
  bool require_simpler = false;
  std::string out_dir;
};

std::vector<double> parse_ratios(const std::string& spec) {
  std::vector<double> ratios;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) ratios.push_back(std::stod(item));
  if (ratios.size() != 3) throw Error("--split needs exactly three ratios");
  return ratios;
}

int cmd_build_dataset(const BuildArgs& args, const GlobalOptions& global) {
  std::set<std::string> tasks;
  {
    std::stringstream ss(args.tasks);
    std::string item;
    while (std::getline(ss, item, ',')) tasks.insert(item);
  }
  for (const auto& t : tasks)
    if (t != "cmt" && t != "mt" && t != "simplify")
      throw Error("unknown task '" + t + "' (expected cmt, mt, simplify)");
  if (tasks.empty()) throw Error("no task selected");

  std::vector<SegmentPair> bilingual, mono, opus;
  if (!args.pairs_path.empty())
    bilingual = load_segment_pairs(args.pairs_path, Language::es, Language::en);
  if (!args.mono_pairs_path.empty())
    mono = load_segment_pairs(args.mono_pairs_path, Language::en, Language::en);
  if (!args.opus_paths.empty())
    opus = load_parallel_text(args.opus_paths[0], args.opus_paths[1], Language::es,
                              Language::en);

  // routing: pairs with differing grades feed CMT, same-grade and grade-less
  // pairs feed MT
  std::vector<TrainingSample> cmt, mt, simplify;
  if (tasks.count("cmt")) {
    if (bilingual.empty()) throw Error("task cmt selected but no --pairs input");
    std::vector<SegmentPair> differing;
    for (const auto& p : bilingual)
      if (p.src.grade && p.tgt.grade && *p.src.grade != *p.tgt.grade) differing.push_back(p);
    cmt = make_cmt_samples(differing, args.require_simpler);
  }
  if (tasks.count("mt")) {
    if (bilingual.empty() && opus.empty())
      throw Error("task mt selected but neither --pairs nor --opus given");
    std::vector<SegmentPair> mt_pairs = bilingual;
    mt_pairs.insert(mt_pairs.end(), opus.begin(), opus.end());
    mt = make_mt_samples(mt_pairs);
  }
  if (tasks.count("simplify")) {
    if (mono.empty()) throw Error("task simplify selected but no --mono-pairs input");
    simplify = make_simplify_samples(mono, Language::en);
  }

  if (args.grade_source == "ari") {
    cmt = retag_with_ari(cmt, RetagScope::newsela_only);
    mt = retag_with_ari(mt, RetagScope::newsela_only);
    simplify = retag_with_ari(simplify, RetagScope::newsela_only);
  } else if (args.grade_source == "ari-all") {
    cmt = retag_with_ari(cmt, RetagScope::all);
    mt = retag_with_ari(mt, RetagScope::all);
    simplify = retag_with_ari(simplify, RetagScope::all);
  } else if (args.grade_source != "gold") {
    throw Error("unknown --grade-source '" + args.grade_source +
                "' (expected gold, ari, ari-all)");
  }

  auto ratios = parse_ratios(args.split);
  SplitSpec spec;
  spec.train = ratios[0];
  spec.dev = ratios[1];
  spec.test = ratios[2];
  spec.seed = global.seed;

  std::vector<TrainingSample> all = build_mixture(cmt, mt, simplify, /*seed=*/0);
  // mixture order before splitting does not matter; the split is by slug
  DatasetSplits splits = split_by_article(all, spec);

  fs::create_directories(args.out_dir);
  const auto emit = [&](const std::vector<TrainingSample>& samples, const std::string& name,
                        std::uint64_t mix_seed) {
    std::vector<TrainingSample> c, m, s;
    for (const auto& x : samples)
      (x.task == Task::cmt ? c : x.task == Task::mt ? m : s).push_back(x);
    std::vector<TrainingSample> mixture = build_mixture(c, m, s, mix_seed);
    fs::path base = fs::path(args.out_dir) / name;
    write_jsonl(mixture, base.string() + ".jsonl");
    write_side_by_side(mixture, base.string() + ".src", base.string() + ".tgt");
    std::cout << name << ": cmt=" << c.size() << " mt=" << m.size()
              << " simplify=" << s.size() << " total=" << mixture.size() << "\n";
  };
  emit(splits.train, "train", global.seed + 1);
  emit(splits.dev, "dev", global.seed + 2);
  emit(splits.test, "test", global.seed + 3);
  return 0;
}

// --- score ---------------------------------------------------------------------

struct ScoreArgs {
  std::string hyp_path;
  std::string refs;  // comma-separated
  std::string src_path;
  std::string grades_path;
  std::string out_path;
  bool pcc_raw = false;
};

int cmd_score(const ScoreArgs& args) {
  std::vector<std::string> ref_paths;
  std::stringstream ss(args.refs);
  std::string item;
  while (std::getline(ss, item, ',')) ref_paths.push_back(item);
  if (ref_paths.empty()) throw Error("--refs needs at least one file");

  EvaluateOptions opts;
  opts.pcc_on_raw_scores = args.pcc_raw;
  MetricReport report = evaluate(args.hyp_path, ref_paths, args.src_path, args.grades_path,
                                 opts);

  nlohmann::ordered_json j;
  to_json(j, report);
  if (!args.out_path.empty()) {
    std::ofstream os(args.out_path, std::ios::binary);
    if (!os) throw Error("cannot write report: " + args.out_path);
    os << j.dump(2) << "\n";
  }

  std::cout << "segments   " << report.n_segments << "\n";
  std::cout << "BLEU       " << format_double(report.bleu, 2) << "\n";
  std::cout << "SARI       " << format_double(100 * report.sari.overall(), 2)
            << "  (add " << format_double(100 * report.sari.add, 2) << ", keep "
            << format_double(100 * report.sari.keep, 2) << ", del "
            << format_double(100 * report.sari.del, 2) << ")\n";
  std::cout << "PCC        " << (report.pcc ? format_double(*report.pcc, 3) : "n/a") << "\n";
  for (const auto& [k, acc] : report.adjacency)
    std::cout << "adjacency@" << k << " " << format_double(acc, 3) << "\n";
  return 0;
}

// --- stats ---------------------------------------------------------------------

struct StatsArgs {
  std::string segments_path;
  std::string group_by = "grade";
};

void print_stats_table(const std::string& title, const std::vector<StatsRow>& rows) {
  std::cout << "# " << title << "\n";
  std::cout << "group\tword_types\ttokens_per_segment\tsents_per_segment\ttokens\tsegments\n";
  for (const auto& r : rows)
    std::cout << r.key << '\t' << r.word_types << '\t'
              << format_double(r.tokens_per_segment(), 2) << '\t'
              << format_double(r.sents_per_segment(), 2) << '\t' << r.token_total << '\t'
              << r.segment_count << "\n";
}

int cmd_stats(const StatsArgs& args) {
  GroupBy group_by;
  if (args.group_by == "grade")
    group_by = GroupBy::grade;
  else if (args.group_by == "corpus")
    group_by = GroupBy::corpus;
  else
    throw Error("unknown --group-by '" + args.group_by + "' (expected grade or corpus)");

  auto pairs = load_segment_pairs(args.segments_path, Language::es, Language::en);
  std::vector<Segment> src_segments, tgt_segments;
  for (const auto& p : pairs) {
    src_segments.push_back(p.src);
    tgt_segments.push_back(p.tgt);
  }
  print_stats_table("source", corpus_stats(src_segments, group_by));
  print_stats_table("target", corpus_stats(tgt_segments, group_by));

  std::cout << "# grade pairs (src\\tgt)\n";
  for (const auto& [grades, count] : grade_pair_matrix(pairs))
    std::cout << grades.first << '\t' << grades.second << '\t' << count << "\n";
  return 0;
}

// --- grade ---------------------------------------------------------------------

struct GradeArgs {
  std::string in_path;
  std::string format = "text";
  std::string side = "tgt";
};

int cmd_grade(const GradeArgs& args) {
  std::cout << "id\tari\tgrade\n";
  if (args.format == "text") {
    auto lines = read_lines(args.in_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      GradeEstimate est = estimate_grade(lines[i]);
      std::cout << (i + 1) << '\t' << format_double(est.raw, 4) << '\t' << est.grade << "\n";
    }
  } else if (args.format == "pairs") {
    auto pairs = load_segment_pairs(args.in_path, Language::es, Language::en);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Segment& seg = args.side == "src" ? pairs[i].src : pairs[i].tgt;
      GradeEstimate est = estimate_grade(seg.text);
      std::cout << (i + 1) << '\t' << format_double(est.raw, 4) << '\t' << est.grade << "\n";
    }
  } else {
    throw Error("unknown --format '" + args.format + "' (expected text or pairs)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus construction and evaluation for complexity-controlled MT"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed for splits and mixtures")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads for align")
      ->capture_default_str();
  app.add_option("--log-level", global.log_level, "error output style: info or json")
      ->capture_default_str();

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "align article families into segment pairs");
  align_cmd->add_option("--families", align_args.families_path,
                        "article JSONL with all versions of each story")->required();
  align_cmd->add_option("--pivots", align_args.pivots,
                        "pivot directory or http(s) endpoint URL")->required();
  align_cmd->add_option("--tau-p", align_args.params.paragraph_threshold,
                        "paragraph similarity threshold")->capture_default_str();
  align_cmd->add_option("--tau-s", align_args.params.sentence_threshold,
                        "sentence similarity threshold")->capture_default_str();
  align_cmd->add_option("--skip-window", align_args.params.skip_window,
                        "max units skippable in one search step")->capture_default_str();
  align_cmd->add_option("--max-group", align_args.params.max_group,
                        "max units merged on one side of a link")->capture_default_str();
  align_cmd->add_option("--min-score", align_args.min_score,
                        "drop pairs scoring below this")->capture_default_str();
  align_cmd->add_option("--out", align_args.out_path, "segment pair JSONL output")
      ->required();
  align_cmd->add_option("--dump-sim", align_args.dump_sim_dir,
                        "debug: dump paragraph similarity matrices as TSV here");

  BuildArgs build_args;
  auto* build_cmd = app.add_subcommand("build-dataset",
                                       "build multitask training samples and splits");
  build_cmd->add_option("--pairs", build_args.pairs_path,
                        "bilingual es-en segment pair JSONL");
  build_cmd->add_option("--mono-pairs", build_args.mono_pairs_path,
                        "monolingual en-en segment pair JSONL");
  build_cmd->add_option("--opus", build_args.opus_paths,
                        "parallel text files: SRC TGT")->expected(2);
  build_cmd->add_option("--tasks", build_args.tasks,
                        "comma list of cmt, mt, simplify")->required();
  build_cmd->add_option("--grade-source", build_args.grade_source,
                        "constraint grades: gold, ari or ari-all")->capture_default_str();
  build_cmd->add_option("--split", build_args.split,
                        "train,dev,test ratios")->capture_default_str();
  build_cmd->add_flag("--require-simpler", build_args.require_simpler,
                      "keep only pairs whose target grade is lower");
  build_cmd->add_option("--out", build_args.out_dir, "output directory")->required();

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "score system output files");
  score_cmd->add_option("--hyp", score_args.hyp_path, "system output, one segment per line")
      ->required();
  score_cmd->add_option("--refs", score_args.refs,
                        "reference file(s), comma-separated")->required();
  score_cmd->add_option("--src", score_args.src_path,
                        "pseudo-source file (baseline MT output)")->required();
  score_cmd->add_option("--grades", score_args.grades_path,
                        "target grade per line")->required();
  score_cmd->add_option("--out", score_args.out_path, "write the JSON report here");
  score_cmd->add_flag("--pcc-raw", score_args.pcc_raw,
                      "correlate raw ARI scores instead of discretized grades");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics tables");
  stats_cmd->add_option("--segments", stats_args.segments_path,
                        "segment pair JSONL")->required();
  stats_cmd->add_option("--group-by", stats_args.group_by, "grade or corpus")
      ->capture_default_str();

  GradeArgs grade_args;
  auto* grade_cmd = app.add_subcommand("grade", "ARI grade per segment as TSV");
  grade_cmd->add_option("--in", grade_args.in_path, "input file")->required();
  grade_cmd->add_option("--format", grade_args.format, "text or pairs")
      ->capture_default_str();
  grade_cmd->add_option("--side", grade_args.side,
                        "segment side to grade in pairs mode: src or tgt")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const auto report_error = [&](const std::string& kind, const std::string& message) {
    if (global.log_level == "json") {
      nlohmann::json j = {{"error", message}, {"kind", kind}};
      std::cerr << j.dump() << "\n";
    } else {
      std::cerr << "ccmt: " << message << "\n";
    }
  };

  try {
    if (align_cmd->parsed()) return cmd_align(align_args, global);
    if (build_cmd->parsed()) return cmd_build_dataset(build_args, global);
    if (score_cmd->parsed()) return cmd_score(score_args);
    if (stats_cmd->parsed()) return cmd_stats(stats_args);
    if (grade_cmd->parsed()) return cmd_grade(grade_args);
  } catch (const Error& e) {
    report_error("data", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 2;
  }
  return 0;
}
