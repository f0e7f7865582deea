#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace structseg;

int main(int argc, char** argv) {
  CLI::App app{"structseg: segmentation targets, metrics, baselines and corpus tools"};
  app.require_subcommand(1);

  cli::IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert sectioned text or JSONL into canonical JSONL");
  c_ingest->add_option("input", ingest.input, "Input file or directory")->required();
  c_ingest->add_option("--format", ingest.format, "sectioned_text or jsonl")->capture_default_str();
  c_ingest->add_option("--modality", ingest.modality, "document or conversation (sectioned_text)")
      ->capture_default_str();
  c_ingest->add_option("--max-depth", ingest.max_depth, "Deepest header level that opens a segment")
      ->capture_default_str();
  c_ingest->add_option("--output,-o", ingest.output, "Output JSONL (default stdout)");

  cli::EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Write target sequences for a labeled corpus");
  c_encode->add_option("corpus", encode.corpus, "Canonical JSONL corpus")->required();
  c_encode->add_option("--mode", encode.mode, "seg_only, labels_only or combined")->capture_default_str();
  c_encode->add_option("--output,-o", encode.output, "Output JSONL (default stdout)");

  cli::DecodeArgs decode;
  auto* c_decode = app.add_subcommand("decode", "Parse (possibly corrupted) target sequences");
  c_decode->add_option("input", decode.input, "JSONL of {id, target[, num_sentences]}")->required();
  c_decode->add_option("--mode", decode.mode, "seg_only, labels_only or combined")->capture_default_str();
  c_decode->add_option("--corpus", decode.corpus, "Corpus supplying num_sentences by id");
  c_decode->add_option("--output,-o", decode.output, "Output JSONL (default stdout)");

  cli::SegmentArgs segment;
  auto* c_segment = app.add_subcommand("segment", "Run a baseline segmenter over a corpus");
  c_segment->add_option("corpus", segment.corpus, "Canonical JSONL corpus")->required();
  c_segment->add_option("--method", segment.method, "texttile or threshold")->capture_default_str();
  c_segment->add_option("--probs", segment.probs, "JSONL of {id, probs} (threshold)");
  c_segment->add_option("--threshold", segment.threshold, "Boundary probability threshold")->capture_default_str();
  c_segment->add_option("--block-size", segment.tiling.block_size, "Sentences per comparison block")
      ->capture_default_str();
  c_segment->add_option("--smoothing", segment.tiling.smoothing_width, "Moving-average width")
      ->capture_default_str();
  c_segment->add_option("--cutoff", segment.tiling.cutoff, "Depth cutoff in standard deviations")
      ->capture_default_str();
  c_segment->add_option("--output,-o", segment.output, "Output JSONL (default stdout)");

  cli::EvalArgs eval;
  std::size_t k = 0;
  auto* c_eval = app.add_subcommand("eval", "Score hypotheses against a reference corpus");
  c_eval->add_option("reference", eval.reference, "Reference canonical JSONL")->required();
  c_eval->add_option("hypothesis", eval.hypothesis, "Hypothesis JSONL (targets or boundaries/labels)")
      ->required();
  c_eval->add_option("--mode", eval.mode, "seg_only, labels_only or combined")->capture_default_str();
  auto* k_opt = c_eval->add_option("--k", k, "Fixed P_k window (default: half mean segment length)");
  c_eval->add_flag("--percent", eval.percent, "Scale rates by 100");
  c_eval->add_option("--output,-o", eval.output, "Report file (default stdout)");

  cli::AugmentArgs augment;
  auto* c_augment = app.add_subcommand("augment", "Apply training-set augmentations");
  c_augment->add_option("corpus", augment.corpus, "Canonical JSONL corpus")->required();
  c_augment->add_option("--ops", augment.ops, "prepend_empty,truncate_replicas")
      ->delimiter(',')
      ->capture_default_str();
  c_augment->add_option("--seed", augment.seed, "RNG seed")->capture_default_str();
  c_augment->add_option("--max-prepend", augment.max_prepend, "Upper bound of empty sentences prepended")
      ->capture_default_str();
  c_augment->add_option("--limits", augment.limits, "Per-turn token limits for replicas")
      ->delimiter(',')
      ->capture_default_str();
  c_augment->add_option("--output,-o", augment.output, "Output JSONL (default stdout)");

  cli::DedupArgs dedup;
  auto* c_dedup = app.add_subcommand("dedup", "Find near-duplicate documents across two corpora");
  c_dedup->add_option("corpus_a", dedup.corpus_a, "First corpus")->required();
  c_dedup->add_option("corpus_b", dedup.corpus_b, "Second corpus")->required();
  c_dedup->add_option("--threshold", dedup.threshold, "Minimum cosine similarity")->capture_default_str();
  c_dedup->add_option("--output,-o", dedup.output, "Output JSONL (default stdout)");

  cli::StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Corpus size and length statistics");
  c_stats->add_option("corpus", stats.corpus, "Canonical JSONL corpus")->required();
  c_stats->add_option("--output,-o", stats.output, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsageError;
  }

  try {
    if (*c_ingest) return cli::cmd_ingest(ingest, std::cout, std::cerr);
    if (*c_encode) return cli::cmd_encode(encode, std::cout, std::cerr);
    if (*c_decode) return cli::cmd_decode(decode, std::cout, std::cerr);
    if (*c_segment) return cli::cmd_segment(segment, std::cout, std::cerr);
    if (*c_eval) {
      if (*k_opt) eval.k = k;
      return cli::cmd_eval(eval, std::cout, std::cerr);
    }
    if (*c_augment) return cli::cmd_augment(augment, std::cout, std::cerr);
    if (*c_dedup) return cli::cmd_dedup(dedup, std::cout, std::cerr);
    if (*c_stats) return cli::cmd_stats(stats, std::cout, std::cerr);
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kDomainError;
  }
  return cli::kUsageError;
}
