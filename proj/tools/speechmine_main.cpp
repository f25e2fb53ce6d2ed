// Copyright 2026-present the speechmine project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front door wiring the pipeline:
// segment -> mine -> postprocess -> evaluate / stats / select-threshold / curate.
// Identical inputs and flags produce byte-identical outputs for any worker
// count; all file outputs are written atomically (temp file + rename).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speechmine/error.hpp"
#include "speechmine/io_util.hpp"
#include "speechmine/manifest.hpp"
#include "speechmine/margin.hpp"
#include "speechmine/matrix.hpp"
#include "speechmine/miner.hpp"
#include "speechmine/postprocess.hpp"
#include "speechmine/segmenter.hpp"

namespace sm = speechmine;

namespace {

void
require_inputs_exist(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) {
        if (!std::filesystem::exists(p)) {
            throw sm::ValidationError("input file does not exist: " + p.string());
        }
    }
}

// every file output goes through here; stdout when no path was given
void
emit(const std::string& out_path, const std::string& contents) {
    if (out_path.empty()) {
        std::fwrite(contents.data(), 1, contents.size(), stdout);
    } else {
        sm::atomic_write_file(out_path, contents);
    }
}

sm::UnitEmbeddingMatrix
load_unit(const std::filesystem::path& path) {
    return sm::l2_normalize(sm::load_embeddings(path));
}

struct MineArgs {
    std::string src, src_manifest, tgt, tgt_manifest, out;
    std::size_t k = 16;
    double threshold = 1.06;
};

struct EvaluateArgs {
    std::string src, refs, out;
    std::size_t k = 4;
};

struct SegmentArgs {
    std::string timeline, lang = "xx", out;
    std::int64_t min_ms = 1000, max_ms = 20000;
};

struct PostprocessArgs {
    std::string alignments, src_manifest, tgt_manifest, out;
    double overlap = 0.20;
};

struct StatsArgs {
    std::vector<std::string> alignments, src_manifests, tgt_manifests;
    std::string out, matrix_out;
};

struct SelectThresholdArgs {
    std::string alignments, src_manifest, tgt_manifest, out;
    double target_hours = 1000.0;
    std::vector<double> grid;
};

struct CurateArgs {
    std::string alignments, src_manifest, tgt_manifest, out;
    std::size_t target_size = 1000;
};

int
run_mine(const MineArgs& a, const sm::KnnOptions& knn_opts) {
    require_inputs_exist({a.src, a.src_manifest, a.tgt, a.tgt_manifest});
    const sm::SegmentManifest src_manifest = sm::load_manifest(a.src_manifest);
    const sm::SegmentManifest tgt_manifest = sm::load_manifest(a.tgt_manifest);
    const sm::EmbeddingMatrix src_raw = sm::load_embeddings(a.src);
    const sm::EmbeddingMatrix tgt_raw = sm::load_embeddings(a.tgt);
    sm::validate_pairing(src_manifest, src_raw);
    sm::validate_pairing(tgt_manifest, tgt_raw);
    const sm::UnitEmbeddingMatrix src = sm::l2_normalize(src_raw);
    const sm::UnitEmbeddingMatrix tgt = sm::l2_normalize(tgt_raw);

    sm::MiningConfig cfg;
    cfg.params.k = a.k;
    cfg.threshold = a.threshold;
    cfg.knn = knn_opts;
    const sm::AlignmentSet mined = sm::mine(src, tgt, cfg);
    emit(a.out, sm::encode_alignments(mined, src_manifest, tgt_manifest));
    return 0;
}

int
run_evaluate(const EvaluateArgs& a, const sm::KnnOptions& knn_opts) {
    require_inputs_exist({a.src, a.refs});
    const sm::UnitEmbeddingMatrix src = load_unit(a.src);
    const sm::UnitEmbeddingMatrix refs = load_unit(a.refs);
    const double error = sm::similarity_search_error(src, refs, {a.k}, knn_opts);
    emit(a.out, "error_rate\t" + sm::format_fixed(error, 6) + "\n");
    return 0;
}

int
run_segment(const SegmentArgs& a) {
    require_inputs_exist({a.timeline});
    const auto timelines = sm::load_timelines(a.timeline);
    const sm::DurationBounds bounds{a.min_ms, a.max_ms};
    std::vector<sm::CandidateSegment> all;
    for (const auto& t : timelines) {
        auto candidates = sm::generate_candidates(t, bounds);
        all.insert(all.end(), candidates.begin(), candidates.end());
    }
    emit(a.out, sm::encode_manifest(sm::candidates_to_manifest(all, a.lang)));
    return 0;
}

int
run_postprocess(const PostprocessArgs& a) {
    require_inputs_exist({a.alignments, a.src_manifest, a.tgt_manifest});
    const sm::SegmentManifest src_manifest = sm::load_manifest(a.src_manifest);
    const sm::SegmentManifest tgt_manifest = sm::load_manifest(a.tgt_manifest);
    const sm::AlignmentSet set = sm::load_alignments(a.alignments, src_manifest, tgt_manifest);
    const sm::AlignmentSet kept = sm::remove_overlaps(set, src_manifest, {a.overlap});
    emit(a.out, sm::encode_alignments(kept, src_manifest, tgt_manifest));
    return 0;
}

int
run_stats(const StatsArgs& a) {
    if (a.alignments.empty() || a.alignments.size() != a.src_manifests.size() ||
        a.alignments.size() != a.tgt_manifests.size()) {
        throw sm::ConfigError("stats needs matching --alignments/--src-manifest/--tgt-manifest triples");
    }
    std::vector<std::filesystem::path> inputs;
    for (std::size_t i = 0; i < a.alignments.size(); ++i) {
        inputs.insert(inputs.end(), {a.alignments[i], a.src_manifests[i], a.tgt_manifests[i]});
    }
    require_inputs_exist(inputs);

    std::size_t count = 0;
    std::int64_t total_ms = 0;
    double score_sum = 0.0;
    double score_min = 0.0, score_max = 0.0;
    // hours of source speech per (src lang, tgt lang)
    std::map<std::pair<std::string, std::string>, std::int64_t> pair_ms;
    std::set<std::string> langs;

    for (std::size_t i = 0; i < a.alignments.size(); ++i) {
        const sm::SegmentManifest src_manifest = sm::load_manifest(a.src_manifests[i]);
        const sm::SegmentManifest tgt_manifest = sm::load_manifest(a.tgt_manifests[i]);
        const sm::AlignmentSet set = sm::load_alignments(a.alignments[i], src_manifest, tgt_manifest);
        for (const sm::Alignment& al : set.alignments) {
            const sm::Segment& s = src_manifest[al.src_index];
            const sm::Segment& t = tgt_manifest[al.tgt_index];
            if (count == 0) {
                score_min = score_max = al.score;
            }
            score_min = std::min(score_min, al.score);
            score_max = std::max(score_max, al.score);
            score_sum += al.score;
            total_ms += s.duration_ms();
            pair_ms[{s.lang, t.lang}] += s.duration_ms();
            langs.insert(s.lang);
            langs.insert(t.lang);
            ++count;
        }
    }

    std::string metrics;
    metrics += "alignments\t" + std::to_string(count) + "\n";
    metrics += "source_hours\t" + sm::format_fixed(static_cast<double>(total_ms) / 3'600'000.0, 6) + "\n";
    if (count > 0) {
        metrics += "min_score\t" + sm::format_fixed(score_min, 6) + "\n";
        metrics += "mean_score\t" + sm::format_fixed(score_sum / static_cast<double>(count), 6) + "\n";
        metrics += "max_score\t" + sm::format_fixed(score_max, 6) + "\n";
    }
    emit(a.out, metrics);

    if (!a.matrix_out.empty()) {
        // rows: source language, columns: target language, cells: hours
        std::string matrix = "src_lang";
        for (const auto& l : langs) {
            matrix += "\t" + l;
        }
        matrix += "\n";
        for (const auto& row : langs) {
            matrix += row;
            for (const auto& col : langs) {
                const auto it = pair_ms.find({row, col});
                matrix += "\t";
                matrix += it == pair_ms.end()
                              ? "-"
                              : sm::format_fixed(static_cast<double>(it->second) / 3'600'000.0, 2);
            }
            matrix += "\n";
        }
        sm::atomic_write_file(a.matrix_out, matrix);
    }
    return 0;
}

int
run_select_threshold(const SelectThresholdArgs& a) {
    require_inputs_exist({a.alignments, a.src_manifest, a.tgt_manifest});
    const sm::SegmentManifest src_manifest = sm::load_manifest(a.src_manifest);
    const sm::SegmentManifest tgt_manifest = sm::load_manifest(a.tgt_manifest);
    const sm::AlignmentSet set = sm::load_alignments(a.alignments, src_manifest, tgt_manifest);
    std::vector<double> grid = a.grid;
    if (grid.empty()) {
        grid.assign(sm::kDefaultThresholdGrid.begin(), sm::kDefaultThresholdGrid.end());
    }
    const sm::ThresholdChoice choice = sm::select_threshold(set, src_manifest, a.target_hours, grid);
    std::string out;
    out += "threshold\t" + sm::format_fixed(choice.threshold, 6) + "\n";
    out += "retained_hours\t" + sm::format_fixed(choice.retained_hours, 6) + "\n";
    out += std::string("shortfall\t") + (choice.shortfall ? "1" : "0") + "\n";
    emit(a.out, out);
    return 0;
}

int
run_curate(const CurateArgs& a) {
    require_inputs_exist({a.alignments, a.src_manifest, a.tgt_manifest});
    const sm::SegmentManifest src_manifest = sm::load_manifest(a.src_manifest);
    const sm::SegmentManifest tgt_manifest = sm::load_manifest(a.tgt_manifest);
    const sm::AlignmentSet set = sm::load_alignments(a.alignments, src_manifest, tgt_manifest);
    const auto sessions = sm::sessions_from_alignments(set, src_manifest);
    const sm::EvalSelection selection = sm::curate_eval_set(sessions, a.target_size);

    sm::AlignmentSet selected;
    selected.alignments.reserve(selection.sample_ids.size());
    for (const std::string& id : selection.sample_ids) {
        selected.alignments.push_back(set.alignments[std::stoull(id)]);
    }
    emit(a.out, sm::encode_alignments(selected, src_manifest, tgt_manifest));
    if (selection.shortfall) {
        std::cerr << "warning\tshortfall\tselected " << selection.sample_ids.size() << " of " << a.target_size
                  << " requested samples\n";
    }
    return 0;
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"speechmine: margin-based global mining over embedded speech segments"};
    app.require_subcommand(1);
    app.fallthrough();  // --workers may follow the subcommand name

    std::size_t workers = 0;
    app.add_option("--workers", workers, "worker threads (0 = all cores)")
        ->envname("MINER_WORKERS")
        ->check(CLI::Range(std::size_t{0}, std::size_t{4096}));

    MineArgs mine_args;
    auto* mine_cmd = app.add_subcommand("mine", "bidirectional margin mining of two embedding pools");
    mine_cmd->add_option("--src", mine_args.src, "source EMB1 file")->required();
    mine_cmd->add_option("--src-manifest", mine_args.src_manifest, "source manifest TSV")->required();
    mine_cmd->add_option("--tgt", mine_args.tgt, "target EMB1 file")->required();
    mine_cmd->add_option("--tgt-manifest", mine_args.tgt_manifest, "target manifest TSV")->required();
    mine_cmd->add_option("--k", mine_args.k, "neighborhood size")->default_val(16);
    mine_cmd->add_option("--threshold", mine_args.threshold, "margin threshold")->default_val(1.06);
    mine_cmd->add_option("--out", mine_args.out, "output alignment TSV (stdout if omitted)");

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "similarity-search error rate of src against refs");
    eval_cmd->add_option("--src", eval_args.src, "source EMB1 file")->required();
    eval_cmd->add_option("--refs", eval_args.refs, "reference EMB1 file (row i matches src row i)")->required();
    eval_cmd->add_option("--k", eval_args.k, "neighborhood size")->default_val(4);
    eval_cmd->add_option("--out", eval_args.out, "output TSV (stdout if omitted)");

    SegmentArgs seg_args;
    auto* seg_cmd = app.add_subcommand("segment", "expand VAD timelines into candidate segments");
    seg_cmd->add_option("--timeline", seg_args.timeline, "timeline TSV")->required();
    seg_cmd->add_option("--lang", seg_args.lang, "language code for generated segments")->default_val("xx");
    seg_cmd->add_option("--min-ms", seg_args.min_ms, "minimum span duration")->default_val(1000);
    seg_cmd->add_option("--max-ms", seg_args.max_ms, "maximum span duration")->default_val(20000);
    seg_cmd->add_option("--out", seg_args.out, "output manifest TSV (stdout if omitted)");

    PostprocessArgs post_args;
    auto* post_cmd = app.add_subcommand("postprocess", "remove overlapping source spans from alignments");
    post_cmd->add_option("--alignments", post_args.alignments, "alignment TSV")->required();
    post_cmd->add_option("--src-manifest", post_args.src_manifest, "source manifest TSV")->required();
    post_cmd->add_option("--tgt-manifest", post_args.tgt_manifest, "target manifest TSV")->required();
    post_cmd->add_option("--overlap", post_args.overlap, "mutual overlap fraction")->default_val(0.20);
    post_cmd->add_option("--out", post_args.out, "output alignment TSV (stdout if omitted)");

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "duration and score statistics of alignment sets");
    stats_cmd->add_option("--alignments", stats_args.alignments, "alignment TSV (repeatable)")->required();
    stats_cmd->add_option("--src-manifest", stats_args.src_manifests, "source manifest TSV (repeatable)")
        ->required();
    stats_cmd->add_option("--tgt-manifest", stats_args.tgt_manifests, "target manifest TSV (repeatable)")
        ->required();
    stats_cmd->add_option("--out", stats_args.out, "metrics TSV (stdout if omitted)");
    stats_cmd->add_option("--matrix-out", stats_args.matrix_out, "per-language-pair hours matrix TSV");

    SelectThresholdArgs sel_args;
    auto* sel_cmd = app.add_subcommand("select-threshold", "highest grid threshold keeping the target hours");
    sel_cmd->add_option("--alignments", sel_args.alignments, "alignment TSV")->required();
    sel_cmd->add_option("--src-manifest", sel_args.src_manifest, "source manifest TSV")->required();
    sel_cmd->add_option("--tgt-manifest", sel_args.tgt_manifest, "target manifest TSV")->required();
    sel_cmd->add_option("--target-hours", sel_args.target_hours, "hours to keep")->default_val(1000.0);
    sel_cmd->add_option("--grid", sel_args.grid, "ascending thresholds (default 1.06 1.07 1.08 1.09)");
    sel_cmd->add_option("--out", sel_args.out, "output TSV (stdout if omitted)");

    CurateArgs cur_args;
    auto* cur_cmd = app.add_subcommand("curate", "select evaluation samples from best-scoring sessions");
    cur_cmd->add_option("--alignments", cur_args.alignments, "alignment TSV")->required();
    cur_cmd->add_option("--src-manifest", cur_args.src_manifest, "source manifest TSV")->required();
    cur_cmd->add_option("--tgt-manifest", cur_args.tgt_manifest, "target manifest TSV")->required();
    cur_cmd->add_option("--target-size", cur_args.target_size, "samples to select")->default_val(1000);
    cur_cmd->add_option("--out", cur_args.out, "output alignment TSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error\tusage\t" << e.what() << "\n";
        return 2;
    }

    sm::KnnOptions knn_opts;
    knn_opts.workers = workers;

    try {
        if (mine_cmd->parsed()) {
            return run_mine(mine_args, knn_opts);
        }
        if (eval_cmd->parsed()) {
            return run_evaluate(eval_args, knn_opts);
        }
        if (seg_cmd->parsed()) {
            return run_segment(seg_args);
        }
        if (post_cmd->parsed()) {
            return run_postprocess(post_args);
        }
        if (stats_cmd->parsed()) {
            return run_stats(stats_args);
        }
        if (sel_cmd->parsed()) {
            return run_select_threshold(sel_args);
        }
        if (cur_cmd->parsed()) {
            return run_curate(cur_args);
        }
    } catch (const sm::Error& e) {
        std::cerr << "error\t" << sm::to_string(e.kind()) << "\t" << e.what() << "\n";
        return e.kind() == sm::ErrorKind::kIo ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error\tinternal\t" << e.what() << "\n";
        return 1;
    }
    return 0;
}
