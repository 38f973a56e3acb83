// whitekit: whitening, isotropy and probing over precomputed embeddings.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "whitekit/whitekit.hpp"

namespace fs = std::filesystem;
using namespace whitekit;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kKindNames = {"pca", "zca", "chol", "zca-cor", "pca-cor"};

// Accepts a manifest file or a dataset directory, relative to the working
// directory or to $WHITEKIT_DATA_DIR.
fs::path resolve_manifest(const std::string& arg) {
  std::vector<fs::path> candidates{arg};
  if (const char* root = std::getenv("WHITEKIT_DATA_DIR"); root && fs::path(arg).is_relative()) {
    candidates.emplace_back(fs::path(root) / arg);
  }
  for (auto p : candidates) {
    if (fs::is_directory(p)) p /= "manifest.json";
    if (fs::exists(p)) return p;
  }
  return candidates.front();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

WhiteningKind kind_from(const std::string& s) {
  const auto k = parse_whitening_kind(s);
  if (!k) throw UsageError("unknown whitening kind '" + s + "'");
  return *k;
}

FitScope scope_from(const std::string& s) {
  const auto k = parse_fit_scope(s);
  if (!k) throw UsageError("unknown fit scope '" + s + "'");
  return *k;
}

Matrix all_rows(const LoadedDataset& ds) {
  if (ds.is_classification()) return ds.labeled().embeddings;
  const auto& p = ds.pairs();
  Matrix stacked(p.left.rows() * 2, p.left.cols());
  stacked << p.left, p.right;
  return stacked;
}

nlohmann::json whitening_json(const WhiteningModel& m, FitScope scope) {
  return {{"kind", std::string(to_string(m.kind))},
          {"fit_scope", std::string(to_string(scope))},
          {"eps_relative", m.eps_relative},
          {"eps_used", m.eps_used},
          {"fit_dims", {m.fit_rows, m.fit_cols}},
          {"model", "model/model.json"}};
}

// Kind label of a dataset produced by `whitekit whiten`, else a generic tag.
std::string against_label(const LoadedDataset& ds) {
  if (ds.manifest.whitening && ds.manifest.whitening->contains("kind")) {
    return ds.manifest.whitening->at("kind").get<std::string>();
  }
  return "against";
}

void emit_table(const ComparisonTable& t, const std::string& csv_path) {
  std::cout << format_table_text(t);
  if (!csv_path.empty()) write_text(csv_path, format_table_csv(t));
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string task = "classification";
  Index n = 1000, d = 16;
  int classes = 2;
  double separation = 4.0, anisotropy = 0.0;
  std::uint64_t seed = 0;
  bool splits = false;
  std::string name = "synthetic", model_name = "synthetic", out;
};

int run_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.task = a.task == "sts" ? TaskType::sts : TaskType::classification;
  spec.n = a.n;
  spec.d = a.d;
  spec.n_classes = a.classes;
  spec.separation = a.separation;
  spec.anisotropy = a.anisotropy;
  spec.seed = a.seed;
  spec.with_splits = a.splits;
  spec.name = a.name;
  spec.model_name = a.model_name;
  const auto m = synth_fixture(spec, a.out);
  std::cout << "wrote " << (fs::path(a.out) / "manifest.json").string() << " ("
            << to_string(m.task) << ", N=" << m.count << ", d=" << m.dim << ")\n";
  return 0;
}

struct WhitenArgs {
  std::string manifest, kind, fit_scope = "all", out;
  double eps = 1e-8;
};

int run_whiten(const WhitenArgs& a) {
  const WhiteningConfig cfg{kind_from(a.kind), a.eps, scope_from(a.fit_scope)};
  const auto ds = load_dataset(resolve_manifest(a.manifest));
  const fs::path out = a.out;

  WhiteningModel model;
  if (ds.is_classification()) {
    const auto& set = ds.labeled();
    if (cfg.fit_scope == FitScope::train_only) {
      if (!set.splits) {
        throw UsageError("--fit-scope train needs a dataset with a splits file");
      }
      std::vector<Index> rows;
      for (std::size_t i = 0; i < set.splits->size(); ++i) {
        if ((*set.splits)[i] == Split::train) rows.push_back(static_cast<Index>(i));
      }
      model = fit_whitening(subset(set, rows).embeddings, cfg);
    } else {
      model = fit_whitening(set.embeddings, cfg);
    }
    LabeledEmbeddingSet white = set;
    white.embeddings = apply_whitening(model, set.embeddings);
    write_classification_dataset(white, out, ds.manifest.name, ds.manifest.model_name,
                                 whitening_json(model, cfg.fit_scope));
  } else {
    if (cfg.fit_scope == FitScope::train_only) {
      throw UsageError("STS datasets have no train split; use --fit-scope all");
    }
    model = fit_pair_whitening(ds.pairs(), cfg);
    const SentencePairSet white{apply_whitening(model, ds.pairs().left),
                                apply_whitening(model, ds.pairs().right),
                                ds.pairs().gold};
    write_sts_dataset(white, out, ds.manifest.name, ds.manifest.model_name,
                      whitening_json(model, cfg.fit_scope));
  }
  save_whitening_model(model, cfg.fit_scope, out / "model");
  std::printf("kind=%s fit_scope=%s eps_used=%.6g fit_dims=%lldx%lld\n",
              std::string(to_string(model.kind)).c_str(),
              std::string(to_string(cfg.fit_scope)).c_str(), model.eps_used,
              static_cast<long long>(model.fit_rows),
              static_cast<long long>(model.fit_cols));
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";
  return 0;
}

struct IsoArgs {
  std::string manifest, emb, against, kind, label, csv, records;
  double eps = 1e-8;
};

int run_isoscore(const IsoArgs& a) {
  if (a.manifest.empty() == a.emb.empty()) {
    throw UsageError("give exactly one of --manifest or --emb");
  }
  if (!a.against.empty() && !a.kind.empty()) {
    throw UsageError("--against and --kind are mutually exclusive");
  }
  std::optional<LoadedDataset> ds;
  Matrix x;
  if (!a.manifest.empty()) {
    ds = load_dataset(resolve_manifest(a.manifest));
    x = all_rows(*ds);
  } else {
    x = load_embeddings(a.emb);
  }
  const std::string label =
      !a.label.empty() ? a.label : ds ? ds->manifest.model_name : fs::path(a.emb).stem().string();
  const std::string dataset = ds ? ds->manifest.name : fs::path(a.emb).filename().string();

  struct Row {
    std::string variant, whitening;
    IsoScoreReport report;
  };
  std::vector<Row> rows{{"raw", "none", isoscore(x)}};
  if (!a.against.empty()) {
    const auto other = load_dataset(resolve_manifest(a.against));
    rows.push_back({"whitened", against_label(other), isoscore(all_rows(other))});
  } else if (!a.kind.empty()) {
    const auto model = fit_whitening(x, {kind_from(a.kind), a.eps, FitScope::all_data});
    rows.push_back({"whitened", a.kind, isoscore(apply_whitening(model, x))});
  }

  for (const auto& r : rows) {
    std::printf("%s %s isoscore=%.6f defect=%.6f n_points=%lld n_dims=%lld\n", label.c_str(),
                r.variant.c_str(), r.report.score, r.report.defect,
                static_cast<long long>(r.report.n_points),
                static_cast<long long>(r.report.n_dims));
  }
  if (!a.csv.empty()) {
    std::string csv = "label,variant,whitening,isoscore,n_points,n_dims\n";
    char buf[256];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%s,%s,%s,%.9f,%lld,%lld\n", label.c_str(),
                    r.variant.c_str(), r.whitening.c_str(), r.report.score,
                    static_cast<long long>(r.report.n_points),
                    static_cast<long long>(r.report.n_dims));
      csv += buf;
    }
    write_text(a.csv, csv);
  }
  if (!a.records.empty()) {
    for (const auto& r : rows) {
      RunRecord rec;
      rec.dataset = dataset;
      rec.model_name = label;
      rec.task = ds ? std::string(to_string(ds->manifest.task)) : "embeddings";
      rec.whitening = r.whitening;
      rec.fit_scope = r.whitening == "none" ? "none" : "all";
      rec.metric = "isoscore";
      rec.value = r.report.score;
      rec.config = {{"scope", "all rows"}, {"eps", a.eps}};
      rec.timestamp = utc_timestamp();
      append_record(a.records, rec);
    }
  }
  return 0;
}

struct EvalArgs {
  std::vector<std::string> manifests, against;
  std::string kind, fit_scope = "all", protocol = "kfold", label, csv, records;
  double eps = 1e-8;
  ProbeConfig probe;
};

// Shared driver for eval-cls and eval-sts: evaluates each dataset raw and in
// the requested whitened variants, then prints one comparison table.
template <typename EvalRaw, typename EvalWhite>
int run_eval(const EvalArgs& a, TaskType task, const std::string& metric, EvalRaw eval_raw,
             EvalWhite eval_white, const nlohmann::json& config_echo) {
  if (!a.against.empty() && a.against.size() != a.manifests.size()) {
    throw UsageError("--against must be given once per --manifest");
  }
  if (!a.against.empty() && !a.kind.empty()) {
    throw UsageError("--against and --kind are mutually exclusive");
  }
  const FitScope scope = scope_from(a.fit_scope);
  std::vector<WhiteningKind> kinds;
  if (a.kind == "all") {
    kinds.assign(kAllWhiteningKinds.begin(), kAllWhiteningKinds.end());
  } else if (!a.kind.empty()) {
    kinds.push_back(kind_from(a.kind));
  }

  ComparisonTable table;
  table.metric = metric;
  std::string model_label = a.label;
  std::vector<std::optional<double>> raw_values;
  std::vector<std::vector<std::optional<double>>> kind_values(kinds.size());
  std::vector<std::optional<double>> against_values;
  std::string against_kind;
  std::vector<RunRecord> records;

  auto record = [&](const LoadedDataset& ds, const std::string& whitening, double value) {
    RunRecord r;
    r.dataset = ds.manifest.name;
    r.model_name = model_label;
    r.task = std::string(to_string(task));
    r.whitening = whitening;
    r.fit_scope = whitening == "none" ? "none" : std::string(to_string(scope));
    r.metric = metric;
    r.value = value;
    r.config = config_echo;
    r.timestamp = utc_timestamp();
    r.seed = a.probe.seed;
    records.push_back(r);
  };

  for (std::size_t i = 0; i < a.manifests.size(); ++i) {
    const auto ds = load_dataset(resolve_manifest(a.manifests[i]));
    if ((task == TaskType::classification) != ds.is_classification()) {
      throw UsageError(ds.manifest.name + ": wrong task type for this command");
    }
    if (model_label.empty()) model_label = ds.manifest.model_name;
    table.columns.push_back(ds.manifest.name);
    const double raw = eval_raw(ds);
    raw_values.push_back(raw);
    record(ds, "none", raw);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const double v = eval_white(ds, WhiteningConfig{kinds[k], a.eps, scope});
      kind_values[k].push_back(v);
      record(ds, std::string(to_string(kinds[k])), v);
    }
    if (!a.against.empty()) {
      const auto other = load_dataset(resolve_manifest(a.against[i]));
      if (other.is_classification() != ds.is_classification()) {
        throw UsageError(other.manifest.name + ": --against task type differs");
      }
      against_kind = against_label(other);
      const double v = eval_raw(other);
      against_values.push_back(v);
      record(other, against_kind, v);
    }
  }

  table.rows.push_back({model_label, raw_values, std::nullopt, std::nullopt});
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    table.rows.push_back({model_label + "_W(" + std::string(to_string(kinds[k])) + ")",
                          kind_values[k], std::size_t{0}, std::nullopt});
  }
  if (kinds.size() > 1) {
    TableRow mean{model_label + "_W(mean)", {}, std::size_t{0}, std::nullopt};
    double lo = 1e300, hi = -1e300;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      double s = 0;
      for (const auto& kv : kind_values) s += *kv[c];
      mean.values.push_back(s / static_cast<double>(kinds.size()));
    }
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const double avg = *row_average(table.rows[k + 1]);
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
    mean.avg_range = std::make_pair(lo, hi);
    table.rows.push_back(mean);
  }
  if (!against_values.empty()) {
    table.rows.push_back(
        {model_label + "_W(" + against_kind + ")", against_values, std::size_t{0}, std::nullopt});
  }

  emit_table(table, a.csv);
  if (!kinds.empty()) {
    std::cout << "fit_scope=" << to_string(scope) << " eps=" << a.eps << "\n";
  }
  if (!a.records.empty()) {
    for (const auto& r : records) append_record(a.records, r);
  }
  return 0;
}

nlohmann::json probe_echo(const EvalArgs& a) {
  const auto& p = a.probe;
  return {{"protocol", a.protocol},       {"learning_rate", p.learning_rate},
          {"rmsprop_decay", p.rmsprop_decay}, {"batch_size", p.batch_size},
          {"max_epochs", p.max_epochs},   {"patience", p.patience},
          {"early_stopping", p.early_stopping},
          {"l2_grid", p.l2_grid},         {"n_folds", p.n_folds},
          {"seed", p.seed},               {"fit_scope", a.fit_scope},
          {"eps", a.eps}};
}

int run_eval_cls(const EvalArgs& a) {
  const Protocol protocol = a.protocol == "fixed" ? Protocol::fixed_split : Protocol::kfold;
  validate(a.probe);
  auto raw = [&](const LoadedDataset& ds) {
    return evaluate_classification(ds.labeled(), a.probe, protocol).accuracy;
  };
  auto white = [&](const LoadedDataset& ds, const WhiteningConfig& w) {
    return evaluate_classification(ds.labeled(), a.probe, protocol, w).accuracy;
  };
  return run_eval(a, TaskType::classification, "accuracy", raw, white, probe_echo(a));
}

int run_eval_sts(const EvalArgs& a) {
  if (scope_from(a.fit_scope) == FitScope::train_only) {
    throw UsageError("STS datasets have no train split; use --fit-scope all");
  }
  auto raw = [](const LoadedDataset& ds) { return evaluate_sts(ds.pairs()).spearman_x100; };
  auto white = [](const LoadedDataset& ds, const WhiteningConfig& w) {
    const auto model = fit_pair_whitening(ds.pairs(), w);
    return evaluate_sts(ds.pairs(), &model, w.fit_scope).spearman_x100;
  };
  return run_eval(a, TaskType::sts, "spearman_x100", raw, white,
                  {{"fit_scope", a.fit_scope}, {"eps", a.eps}});
}

struct ProjectArgs {
  std::string manifest, csv, kind;
  Index k = 2;
  double eps = 1e-8;
};

int run_project(const ProjectArgs& a) {
  const auto ds = load_dataset(resolve_manifest(a.manifest));
  Matrix x = all_rows(ds);
  if (a.k < 1 || a.k > x.cols()) {
    throw UsageError("--k must be between 1 and d = " + std::to_string(x.cols()));
  }
  if (!a.kind.empty()) {
    const auto model = fit_whitening(x, {kind_from(a.kind), a.eps, FitScope::all_data});
    x = apply_whitening(model, x);
  }
  const Matrix p = pca_project(x, a.k);
  const bool labeled = ds.is_classification();
  std::string out;
  for (Index j = 0; j < a.k; ++j) out += (j ? ",pc" : "pc") + std::to_string(j + 1);
  out += labeled ? ",label\n" : "\n";
  char buf[40];
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < a.k; ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? "," : "", p(i, j));
      out += buf;
    }
    if (labeled) out += "," + std::to_string(ds.labeled().labels[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  write_text(a.csv, out);
  std::cout << "wrote " << a.csv << " (" << p.rows() << " rows, k=" << a.k << ")\n";
  return 0;
}

struct ReportArgs {
  std::string records, metric = "accuracy", csv;
};

int run_report(const ReportArgs& a) {
  const auto table = table_from_records(read_records(a.records), a.metric);
  if (table.rows.empty()) throw UsageError("no records with metric " + a.metric);
  emit_table(table, a.csv);
  return 0;
}

struct ImportArgs {
  std::string embeddings_csv, left_csv, right_csv, gold, out, name = "imported",
                                                           model_name = "unknown";
  bool label_column = false;
  int n_classes = 0;
};

int run_import(const ImportArgs& a) {
  if (!a.embeddings_csv.empty()) {
    if (!a.label_column) {
      throw UsageError("classification import needs --label-column");
    }
    auto csv = import_csv(a.embeddings_csv, true);
    LabeledEmbeddingSet set;
    set.embeddings = std::move(csv.embeddings);
    set.labels = std::move(*csv.labels);
    int max_label = 0;
    for (int y : set.labels) max_label = std::max(max_label, y);
    set.n_classes = a.n_classes > 0 ? a.n_classes : max_label + 1;
    const auto m = write_classification_dataset(set, a.out, a.name, a.model_name);
    std::cout << "wrote " << (fs::path(a.out) / "manifest.json").string() << " (N=" << m.count
              << ", d=" << m.dim << ")\n";
    return 0;
  }
  if (a.left_csv.empty() || a.right_csv.empty() || a.gold.empty()) {
    throw UsageError("give --embeddings-csv, or all of --left-csv --right-csv --gold");
  }
  SentencePairSet pairs{import_csv(a.left_csv, false).embeddings,
                        import_csv(a.right_csv, false).embeddings,
                        parse_reals(detail::read_file(a.gold), a.gold)};
  const auto m = write_sts_dataset(pairs, a.out, a.name, a.model_name);
  std::cout << "wrote " << (fs::path(a.out) / "manifest.json").string() << " (pairs=" << m.count
            << ", d=" << m.dim << ")\n";
  return 0;
}

void add_eval_options(CLI::App* cmd, EvalArgs& a, bool probe) {
  cmd->add_option("--manifest", a.manifests, "Dataset manifest(s); one table column each")
      ->required();
  cmd->add_option("--against", a.against,
                  "Pre-whitened manifest(s), one per --manifest, evaluated as the _W row");
  std::vector<std::string> kinds = kKindNames;
  kinds.push_back("all");
  cmd->add_option("--kind", a.kind, "Whitening kind to compare against (or 'all')")
      ->check(CLI::IsMember(kinds));
  cmd->add_option("--eps", a.eps, "Relative eigenvalue floor")->check(CLI::NonNegativeNumber);
  cmd->add_option("--fit-scope", a.fit_scope, "Rows the whitening is fitted on")
      ->check(CLI::IsMember({"train", "all"}));
  cmd->add_option("--label", a.label, "Model label for the table rows");
  cmd->add_option("--csv", a.csv, "Write the table as CSV to this file");
  cmd->add_option("--records", a.records, "Append RunRecords (JSON lines) to this file");
  if (!probe) return;
  cmd->add_option("--protocol", a.protocol, "kfold or fixed (train/dev/test splits)")
      ->check(CLI::IsMember({"kfold", "fixed"}));
  cmd->add_option("--folds", a.probe.n_folds)->check(CLI::PositiveNumber);
  cmd->add_option("--lr", a.probe.learning_rate)->check(CLI::NonNegativeNumber);
  cmd->add_option("--decay", a.probe.rmsprop_decay);
  cmd->add_option("--batch", a.probe.batch_size)->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", a.probe.max_epochs)->check(CLI::PositiveNumber);
  cmd->add_option("--patience", a.probe.patience)->check(CLI::PositiveNumber);
  cmd->add_flag("!--no-early-stopping", a.probe.early_stopping,
                "Train every run for --epochs and keep the final parameters");
  cmd->add_option("--l2", a.probe.l2_grid, "Weight-decay grid")->expected(1, -1);
  cmd->add_option("--seed", a.probe.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"whitekit: whitening, isotropy and probing for sentence embeddings"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic dataset");
  c_synth->add_option("--task", synth.task)->check(CLI::IsMember({"classification", "sts"}));
  c_synth->add_option("--n", synth.n, "Rows (classification) or pairs (sts)")
      ->check(CLI::Range(Index{2}, Index{100000000}));
  c_synth->add_option("--d", synth.d)->check(CLI::Range(Index{1}, Index{1000000}));
  c_synth->add_option("--classes", synth.classes)->check(CLI::Range(2, 1000000));
  c_synth->add_option("--separation", synth.separation)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--anisotropy", synth.anisotropy)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_flag("--splits", synth.splits, "Also write an 80/10/10 splits file");
  c_synth->add_option("--name", synth.name);
  c_synth->add_option("--model-name", synth.model_name);
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  WhitenArgs whiten;
  auto* c_whiten = app.add_subcommand("whiten", "Fit and apply a whitening transform");
  c_whiten->add_option("--manifest", whiten.manifest)->required();
  c_whiten->add_option("--kind", whiten.kind)->required()->check(CLI::IsMember(kKindNames));
  c_whiten->add_option("--eps", whiten.eps)->check(CLI::NonNegativeNumber);
  c_whiten->add_option("--fit-scope", whiten.fit_scope)->check(CLI::IsMember({"train", "all"}));
  c_whiten->add_option("--out", whiten.out, "Output dataset directory")->required();

  IsoArgs iso;
  auto* c_iso = app.add_subcommand("isoscore", "IsoScore of a dataset or embedding file");
  c_iso->add_option("--manifest", iso.manifest);
  c_iso->add_option("--emb", iso.emb, "EMB1 embedding file");
  c_iso->add_option("--against", iso.against, "Whitened manifest for paired output");
  c_iso->add_option("--kind", iso.kind, "Whiten on the fly for paired output")
      ->check(CLI::IsMember(kKindNames));
  c_iso->add_option("--eps", iso.eps)->check(CLI::NonNegativeNumber);
  c_iso->add_option("--label", iso.label);
  c_iso->add_option("--csv", iso.csv);
  c_iso->add_option("--records", iso.records);

  EvalArgs cls;
  auto* c_cls = app.add_subcommand("eval-cls", "Linear-probe accuracy, raw vs whitened");
  add_eval_options(c_cls, cls, true);

  EvalArgs sts;
  auto* c_sts = app.add_subcommand("eval-sts", "STS Spearman x100, raw vs whitened");
  add_eval_options(c_sts, sts, false);

  ProjectArgs proj;
  auto* c_proj = app.add_subcommand("project", "PCA projection to CSV for scatter plots");
  c_proj->add_option("--manifest", proj.manifest)->required();
  c_proj->add_option("--k", proj.k)->check(CLI::PositiveNumber);
  c_proj->add_option("--kind", proj.kind, "Whiten before projecting")
      ->check(CLI::IsMember(kKindNames));
  c_proj->add_option("--eps", proj.eps)->check(CLI::NonNegativeNumber);
  c_proj->add_option("--csv", proj.csv, "Output CSV")->required();

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Tabulate a RunRecord log");
  c_report->add_option("--records", report.records)->required();
  c_report->add_option("--metric", report.metric)
      ->check(CLI::IsMember({"accuracy", "spearman_x100", "isoscore"}));
  c_report->add_option("--csv", report.csv);

  ImportArgs imp;
  auto* c_import = app.add_subcommand("import", "Convert CSV embedding dumps to a dataset");
  c_import->add_option("--embeddings-csv", imp.embeddings_csv);
  c_import->add_flag("--label-column", imp.label_column, "Last CSV column is the label");
  c_import->add_option("--n-classes", imp.n_classes);
  c_import->add_option("--left-csv", imp.left_csv);
  c_import->add_option("--right-csv", imp.right_csv);
  c_import->add_option("--gold", imp.gold, "Gold scores, one per line");
  c_import->add_option("--name", imp.name);
  c_import->add_option("--model-name", imp.model_name);
  c_import->add_option("--out", imp.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_synth) return run_synth(synth);
    if (*c_whiten) return run_whiten(whiten);
    if (*c_iso) return run_isoscore(iso);
    if (*c_cls) return run_eval_cls(cls);
    if (*c_sts) return run_eval_sts(sts);
    if (*c_proj) return run_project(proj);
    if (*c_report) return run_report(report);
    if (*c_import) return run_import(imp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
