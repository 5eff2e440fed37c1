#include "divprof/report.hpp"

#include "divprof/error.hpp"
#include "svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace divprof::report {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

nlohmann::json test_to_json(const stats::StatTestResult& t) {
    nlohmann::json obj;
    obj["method"] = t.method;
    obj["statistic"] = t.statistic;
    obj["df"] = t.df;
    obj["p_value"] = t.p_value;
    if (t.p_adjusted) obj["p_adjusted"] = *t.p_adjusted;
    if (t.effect_size) obj["rank_biserial"] = *t.effect_size;
    obj["group_sizes"] = t.group_sizes;
    return obj;
}

stats::StatTestResult test_from_json(const nlohmann::json& obj) {
    stats::StatTestResult t;
    t.method = obj.at("method").get<std::string>();
    t.statistic = obj.at("statistic").get<double>();
    t.df = obj.at("df").get<std::size_t>();
    t.p_value = obj.at("p_value").get<double>();
    if (obj.contains("p_adjusted")) t.p_adjusted = obj["p_adjusted"].get<double>();
    if (obj.contains("rank_biserial")) t.effect_size = obj["rank_biserial"].get<double>();
    t.group_sizes = obj.at("group_sizes").get<std::vector<std::size_t>>();
    return t;
}

nlohmann::json descriptive_to_json(const stats::Descriptive& d) {
    nlohmann::json obj;
    obj["min"] = d.min;
    obj["q1"] = d.q1;
    obj["median"] = d.median;
    obj["q3"] = d.q3;
    obj["max"] = d.max;
    obj["mean"] = d.mean;
    obj["sd"] = d.sd;
    return obj;
}

stats::Descriptive descriptive_from_json(const nlohmann::json& obj) {
    stats::Descriptive d;
    d.min = obj.at("min").get<double>();
    d.q1 = obj.at("q1").get<double>();
    d.median = obj.at("median").get<double>();
    d.q3 = obj.at("q3").get<double>();
    d.max = obj.at("max").get<double>();
    d.mean = obj.at("mean").get<double>();
    d.sd = obj.at("sd").get<double>();
    return d;
}

nlohmann::json profile_to_json(const ModelProfile& p) {
    nlohmann::json obj;
    obj["model"] = p.model;
    obj["n"] = p.n;
    obj["skipped_empty"] = p.skipped_empty;
    obj["vocabulary_size"] = p.vocabulary_size;
    obj["pooled_yules_k"] = opt_json(p.pooled_yules_k);
    obj["pooled_hapax_ratio"] = opt_json(p.pooled_hapax_ratio);
    nlohmann::json descriptive = nlohmann::json::object();
    for (const auto& [name, d] : p.descriptive) descriptive[name] = descriptive_to_json(d);
    obj["descriptive"] = std::move(descriptive);
    obj["excluded"] = p.excluded;
    nlohmann::json rows = nlohmann::json::array();
    for (const MetricRow& row : p.rows) {
        nlohmann::json r;
        r["prompt_id"] = row.prompt_id;
        r["token_count"] = row.metrics.token_count;
        nlohmann::json metrics = nlohmann::json::object();
        for (const std::string& name : lexmetrics::metric_names()) {
            metrics[name] = opt_json(lexmetrics::metric_value(row.metrics, name));
        }
        r["metrics"] = std::move(metrics);
        rows.push_back(std::move(r));
    }
    obj["responses"] = std::move(rows);
    return obj;
}

ModelProfile profile_from_json(const nlohmann::json& obj) {
    ModelProfile p;
    p.model = obj.at("model").get<std::string>();
    p.n = obj.at("n").get<std::size_t>();
    p.skipped_empty = obj.at("skipped_empty").get<std::size_t>();
    p.vocabulary_size = obj.at("vocabulary_size").get<std::size_t>();
    p.pooled_yules_k = opt_from_json(obj.at("pooled_yules_k"));
    p.pooled_hapax_ratio = opt_from_json(obj.at("pooled_hapax_ratio"));
    for (const auto& [name, d] : obj.at("descriptive").items()) {
        p.descriptive[name] = descriptive_from_json(d);
    }
    for (const auto& [name, count] : obj.at("excluded").items()) {
        p.excluded[name] = count.get<std::size_t>();
    }
    for (const auto& r : obj.at("responses")) {
        MetricRow row;
        row.prompt_id = r.at("prompt_id").get<std::string>();
        row.metrics.token_count = r.at("token_count").get<std::size_t>();
        for (const auto& [name, value] : r.at("metrics").items()) {
            lexmetrics::set_metric_value(row.metrics, name, opt_from_json(value));
        }
        p.rows.push_back(std::move(row));
    }
    return p;
}

// -- figure rendering -------------------------------------------------------

// Figure layout constants; every emitted figure derives from this block.
struct FigureLayout {
    double margin = 48.0;
    double legend_height = 26.0;
    double bar_panel_width = 250.0;
    double bar_panel_height = 210.0;
    double ridge_panel_height_per_model = 44.0;
    double ridge_panel_width = 560.0;
    double ridge_label_width = 120.0;
    double ridge_gap = 34.0;
    double scatter_cell = 112.0;
    double scatter_gap = 10.0;
    double font = 11.0;
    double title_font = 13.0;
};

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#4c72b0", "#dd8452", "#55a868", "#c44e52",
        "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
    };
    return colors;
}

const std::string& model_color(std::size_t index) {
    return palette()[index % palette().size()];
}

void draw_legend(detail::SvgDoc& svg, const std::vector<std::string>& models, double x, double y,
                 const FigureLayout& layout) {
    double cx = x;
    for (std::size_t m = 0; m < models.size(); ++m) {
        svg.rect(cx, y, 12, 12, model_color(m));
        svg.text(cx + 16, y + 10, models[m], layout.font);
        cx += 16.0 + 7.0 * static_cast<double>(models[m].size()) + 26.0;
    }
}

std::vector<double> defined_values(const ModelProfile& profile, const std::string& metric) {
    std::vector<double> out;
    for (const MetricRow& row : profile.rows) {
        if (const auto v = lexmetrics::metric_value(row.metrics, metric)) {
            out.push_back(*v);
        }
    }
    return out;
}

std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string render_lexical_figure(std::span<const ModelProfile> profiles,
                                  const FigureLayout& layout) {
    struct Measure {
        std::string title;
        std::vector<std::optional<double>> values;
    };
    std::vector<Measure> measures(3);
    measures[0].title = "Yule's K (pooled)";
    measures[1].title = "Hapax ratio (pooled)";
    measures[2].title = "Vocabulary size";
    std::vector<std::string> models;
    for (const ModelProfile& p : profiles) {
        models.push_back(p.model);
        measures[0].values.push_back(p.pooled_yules_k);
        measures[1].values.push_back(p.pooled_hapax_ratio);
        measures[2].values.push_back(static_cast<double>(p.vocabulary_size));
    }

    const double width = layout.margin * 2 +
                         3 * layout.bar_panel_width + 2 * layout.scatter_gap;
    const double height = layout.margin * 2 + layout.legend_height + layout.bar_panel_height;
    detail::SvgDoc svg(width, height);
    draw_legend(svg, models, layout.margin, layout.margin - 24.0, layout);

    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        const double px = layout.margin + static_cast<double>(mi) *
                          (layout.bar_panel_width + layout.scatter_gap);
        const double py = layout.margin + layout.legend_height;
        const double plot_h = layout.bar_panel_height - 40.0;
        svg.text(px + layout.bar_panel_width / 2, py - 4, measures[mi].title, layout.title_font,
                 "middle");
        double max_value = 0.0;
        for (const auto& v : measures[mi].values) {
            if (v && *v > max_value) max_value = *v;
        }
        if (max_value <= 0.0) max_value = 1.0;
        const double n_bars = static_cast<double>(models.size());
        const double slot = layout.bar_panel_width / n_bars;
        const double bar_w = slot * 0.7;
        svg.line(px, py + plot_h, px + layout.bar_panel_width, py + plot_h, "#333333", 1.0);
        for (std::size_t b = 0; b < models.size(); ++b) {
            const auto& v = measures[mi].values[b];
            const double bx = px + slot * static_cast<double>(b) + (slot - bar_w) / 2;
            if (v) {
                const double bh = plot_h * (*v / max_value);
                svg.rect(bx, py + plot_h - bh, bar_w, bh, model_color(b), 0.9);
                svg.text(bx + bar_w / 2, py + plot_h - bh - 3, format_sig(*v), layout.font,
                         "middle");
            } else {
                svg.text(bx + bar_w / 2, py + plot_h - 3, "n/a", layout.font, "middle", "#999999");
            }
        }
    }
    return svg.str();
}

std::string render_distribution_figure(const ComparisonReport& report,
                                       std::span<const ModelProfile> profiles,
                                       const FigureLayout& layout) {
    std::vector<std::string> models;
    for (const ModelProfile& p : profiles) models.push_back(p.model);

    const double panel_h =
        layout.ridge_panel_height_per_model * static_cast<double>(profiles.size());
    const double width =
        layout.margin * 2 + layout.ridge_label_width + layout.ridge_panel_width;
    const double height = layout.margin * 2 + layout.legend_height +
                          static_cast<double>(report.metrics.size()) * (panel_h + layout.ridge_gap);
    detail::SvgDoc svg(width, height);
    draw_legend(svg, models, layout.margin, layout.margin - 24.0, layout);

    const double plot_x = layout.margin + layout.ridge_label_width;
    double py = layout.margin + layout.legend_height;
    for (const std::string& metric : report.metrics) {
        // shared x range across models for this metric
        double lo = 0.0, hi = 0.0;
        bool any = false;
        std::vector<std::vector<double>> values_by_model;
        for (const ModelProfile& p : profiles) {
            values_by_model.push_back(defined_values(p, metric));
            for (double v : values_by_model.back()) {
                if (!any) {
                    lo = hi = v;
                    any = true;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        svg.text(layout.margin, py + 12, metric, layout.title_font);
        if (!any) {
            svg.text(plot_x, py + 12, "no data", layout.font, "start", "#999999");
            py += panel_h + layout.ridge_gap;
            continue;
        }
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        auto x_of = [&](double v) {
            return plot_x + (v - lo) / (hi - lo) * layout.ridge_panel_width;
        };
        for (std::size_t m = 0; m < profiles.size(); ++m) {
            const double baseline =
                py + layout.ridge_panel_height_per_model * static_cast<double>(m + 1) - 6.0;
            const double row_h = layout.ridge_panel_height_per_model - 10.0;
            svg.line(plot_x, baseline, plot_x + layout.ridge_panel_width, baseline, "#cccccc",
                     0.6);
            const std::vector<double>& values = values_by_model[m];
            bool drew_curve = false;
            if (values.size() >= 2) {
                try {
                    const stats::DensityCurve curve = stats::kde_density(values, 128);
                    double ymax = 0.0;
                    for (double y : curve.ys) ymax = std::max(ymax, y);
                    if (ymax > 0.0) {
                        // widen the panel range so curve tails stay visible
                        const double clo = std::min(lo, curve.xs.front());
                        const double chi = std::max(hi, curve.xs.back());
                        auto cx_of = [&](double v) {
                            return plot_x + (v - clo) / (chi - clo) * layout.ridge_panel_width;
                        };
                        std::vector<std::pair<double, double>> poly;
                        poly.reserve(curve.xs.size() + 2);
                        poly.emplace_back(cx_of(curve.xs.front()), baseline);
                        for (std::size_t i = 0; i < curve.xs.size(); ++i) {
                            poly.emplace_back(cx_of(curve.xs[i]),
                                              baseline - row_h * (curve.ys[i] / ymax));
                        }
                        poly.emplace_back(cx_of(curve.xs.back()), baseline);
                        svg.polygon(poly, model_color(m), 0.55);
                        drew_curve = true;
                    }
                } catch (const DegenerateData&) {
                    // fall through to the point marker
                }
            }
            if (!drew_curve && !values.empty()) {
                svg.circle(x_of(values.front()), baseline - 4.0, 3.0, model_color(m));
            }
        }
        const double axis_y = py + panel_h - 4.0;
        svg.text(plot_x, axis_y + 10, format_sig(lo), layout.font, "start", "#666666");
        svg.text(plot_x + layout.ridge_panel_width, axis_y + 10, format_sig(hi), layout.font,
                 "end", "#666666");
        py += panel_h + layout.ridge_gap;
    }
    return svg.str();
}

std::string render_scatter_figure(const ComparisonReport& report,
                                  std::span<const ModelProfile> profiles,
                                  const FigureLayout& layout) {
    const std::vector<std::string>& metrics = report.metrics;
    const std::size_t k = metrics.size();
    std::vector<std::string> models;
    for (const ModelProfile& p : profiles) models.push_back(p.model);

    // per-metric ranges over pooled defined values
    std::vector<double> lo(k, 0.0), hi(k, 0.0);
    std::vector<bool> any(k, false);
    for (std::size_t mi = 0; mi < k; ++mi) {
        for (const ModelProfile& p : profiles) {
            for (double v : defined_values(p, metrics[mi])) {
                if (!any[mi]) {
                    lo[mi] = hi[mi] = v;
                    any[mi] = true;
                } else {
                    lo[mi] = std::min(lo[mi], v);
                    hi[mi] = std::max(hi[mi], v);
                }
            }
        }
        if (!any[mi] || lo[mi] == hi[mi]) {
            lo[mi] -= 0.5;
            hi[mi] += 0.5;
        }
    }

    const double grid = static_cast<double>(k) * (layout.scatter_cell + layout.scatter_gap);
    const double width = layout.margin * 2 + grid;
    const double height = layout.margin * 2 + layout.legend_height + grid;
    detail::SvgDoc svg(width, height);
    draw_legend(svg, models, layout.margin, layout.margin - 24.0, layout);

    auto cell_origin = [&](std::size_t row, std::size_t col) {
        const double x = layout.margin + static_cast<double>(col) *
                         (layout.scatter_cell + layout.scatter_gap);
        const double y = layout.margin + layout.legend_height +
                         static_cast<double>(row) * (layout.scatter_cell + layout.scatter_gap);
        return std::pair<double, double>{x, y};
    };

    for (std::size_t row = 0; row < k; ++row) {
        for (std::size_t col = 0; col <= row; ++col) {
            const auto [cx, cy] = cell_origin(row, col);
            if (row == col) {
                svg.text(cx + layout.scatter_cell / 2, cy + layout.scatter_cell / 2, metrics[row],
                         layout.font, "middle");
                continue;
            }
            svg.rect(cx, cy, layout.scatter_cell, layout.scatter_cell, "#fafafa");
            svg.line(cx, cy + layout.scatter_cell, cx + layout.scatter_cell,
                     cy + layout.scatter_cell, "#bbbbbb", 0.7);
            svg.line(cx, cy, cx, cy + layout.scatter_cell, "#bbbbbb", 0.7);
            for (std::size_t m = 0; m < profiles.size(); ++m) {
                for (const MetricRow& r : profiles[m].rows) {
                    const auto x = lexmetrics::metric_value(r.metrics, metrics[col]);
                    const auto y = lexmetrics::metric_value(r.metrics, metrics[row]);
                    if (!x || !y) continue;
                    const double px =
                        cx + (*x - lo[col]) / (hi[col] - lo[col]) * layout.scatter_cell;
                    const double py =
                        cy + layout.scatter_cell -
                        (*y - lo[row]) / (hi[row] - lo[row]) * layout.scatter_cell;
                    svg.circle(px, py, 1.8, model_color(m));
                }
            }
            if (row < report.correlations.size() && col < report.correlations[row].size()) {
                if (const auto r = report.correlations[row][col]) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "r=%.3f", *r);
                    svg.text(cx + 4, cy + 12, buf, layout.font, "start", "#444444");
                }
            }
        }
    }
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    out << content;
    if (!out) {
        throw IoError("write failure: " + path);
    }
}

} // namespace

lexmetrics::MetricVector score_response(const corpus::ResponseRecord& record,
                                        const semmetrics::EmbeddingProvider& provider,
                                        const semmetrics::SentimentLexicon& lexicon,
                                        const ProfileOptions& options) {
    lexmetrics::MetricVector mv;
    const std::vector<textseg::Token> tokens = textseg::tokenize_words(record.response);
    mv.token_count = tokens.size();
    if (tokens.empty()) {
        return mv; // nothing is defined on an empty response
    }
    mv.unique_word_ratio = lexmetrics::unique_word_ratio(tokens);
    mv.avg_word_length = lexmetrics::avg_word_length(tokens);
    mv.token_diversity = lexmetrics::token_diversity(tokens, options.entropy_log_base);
    const lexmetrics::FrequencySpectrum spectrum = lexmetrics::frequency_spectrum(tokens);
    if (spectrum.total_tokens >= 2) {
        mv.yules_k = lexmetrics::yules_k(spectrum);
    }
    mv.hapax_ratio = lexmetrics::hapax_ratio(spectrum, options.hapax_basis);
    mv.sentence_complexity = lexmetrics::sentence_complexity(record.response, options.abbreviations);
    mv.fk_grade = semmetrics::fk_grade(record.response, options.abbreviations);
    mv.sentiment = semmetrics::sentiment_compound(record.response, lexicon);
    mv.semantic_similarity = semmetrics::semantic_similarity(record.prompt, record.response, provider);
    return mv;
}

ModelProfile profile_model(std::span<const corpus::ResponseRecord> responses,
                           const semmetrics::EmbeddingProvider& provider,
                           const semmetrics::SentimentLexicon& lexicon,
                           const ProfileOptions& options) {
    if (responses.empty()) {
        throw InvalidArgument("profile_model: no responses");
    }
    const std::string& model = responses.front().model;
    for (const corpus::ResponseRecord& rec : responses) {
        if (rec.model != model) {
            throw InvalidArgument("profile_model: mixed models ('" + model + "' vs '" + rec.model +
                                  "')");
        }
    }

    // score in parallel; slot-indexed writes keep the result order stable
    std::vector<MetricRow> scored(responses.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= responses.size()) break;
            try {
                scored[i].prompt_id = responses[i].prompt_id;
                scored[i].metrics = score_response(responses[i], provider, lexicon, options);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::size_t n_threads = options.threads;
    if (n_threads == 0) {
        n_threads = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
    }
    n_threads = std::min(n_threads, responses.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ModelProfile profile;
    profile.model = model;
    for (MetricRow& row : scored) {
        if (row.metrics.token_count == 0) {
            ++profile.skipped_empty;
            continue;
        }
        profile.rows.push_back(std::move(row));
    }
    profile.n = profile.rows.size();

    for (const std::string& name : lexmetrics::metric_names()) {
        std::vector<double> values;
        for (const MetricRow& row : profile.rows) {
            if (const auto v = lexmetrics::metric_value(row.metrics, name)) values.push_back(*v);
        }
        profile.excluded[name] = profile.rows.size() - values.size();
        if (!values.empty()) {
            profile.descriptive[name] = stats::describe(values);
        }
    }

    profile.vocabulary_size = lexmetrics::vocabulary_size(responses);
    std::vector<textseg::Token> pooled;
    for (const corpus::ResponseRecord& rec : responses) {
        auto tokens = textseg::tokenize_words(rec.response);
        pooled.insert(pooled.end(), std::make_move_iterator(tokens.begin()),
                      std::make_move_iterator(tokens.end()));
    }
    const lexmetrics::FrequencySpectrum pooled_spectrum = lexmetrics::frequency_spectrum(pooled);
    if (pooled_spectrum.total_tokens >= 2) {
        profile.pooled_yules_k = lexmetrics::yules_k(pooled_spectrum);
    }
    if (pooled_spectrum.type_count() >= 1) {
        profile.pooled_hapax_ratio = lexmetrics::hapax_ratio(pooled_spectrum, options.hapax_basis);
    }
    return profile;
}

std::vector<ModelProfile> profile_corpus(const corpus::Corpus& corpus,
                                         const semmetrics::EmbeddingProvider& provider,
                                         const semmetrics::SentimentLexicon& lexicon,
                                         const ProfileOptions& options) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<corpus::ResponseRecord>> by_model;
    for (const corpus::ResponseRecord& rec : corpus.records) {
        if (!by_model.count(rec.model)) order.push_back(rec.model);
        by_model[rec.model].push_back(rec);
    }
    std::vector<ModelProfile> profiles;
    profiles.reserve(order.size());
    for (const std::string& model : order) {
        profiles.push_back(profile_model(by_model[model], provider, lexicon, options));
    }
    return profiles;
}

ComparisonReport compare_models(std::span<const ModelProfile> profiles) {
    if (profiles.size() < 2) {
        throw InvalidArgument("compare_models: needs at least 2 profiles");
    }
    ComparisonReport report;
    for (const ModelProfile& p : profiles) report.models.push_back(p.model);
    report.metrics = lexmetrics::metric_names();

    for (const std::string& metric : report.metrics) {
        MetricComparison comparison;
        std::vector<std::vector<double>> groups;
        std::vector<std::size_t> group_index; // profile index per group
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            std::vector<double> values = defined_values(profiles[i], metric);
            if (!values.empty()) {
                groups.push_back(std::move(values));
                group_index.push_back(i);
            }
        }

        bool all_identical = true;
        std::optional<double> first;
        for (const auto& g : groups) {
            for (double v : g) {
                if (!first) first = v;
                else if (v != *first) all_identical = false;
            }
        }
        if (groups.size() < 2 || !first || all_identical) {
            comparison.degenerate = true;
            report.by_metric[metric] = std::move(comparison);
            continue;
        }

        try {
            comparison.omnibus = stats::kruskal_wallis(groups);
        } catch (const DataError&) {
            comparison.degenerate = true;
        } catch (const InvalidArgument&) {
            comparison.degenerate = true;
        }
        if (comparison.degenerate) { // untestable metric: no pairwise family either
            report.by_metric[metric] = std::move(comparison);
            continue;
        }

        std::vector<double> raw_p;
        for (std::size_t a = 0; a < groups.size(); ++a) {
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                PairwiseResult pair;
                pair.model_a = profiles[group_index[a]].model;
                pair.model_b = profiles[group_index[b]].model;
                pair.test = stats::mann_whitney_u(groups[a], groups[b]);
                raw_p.push_back(pair.test.p_value);
                comparison.pairwise.push_back(std::move(pair));
            }
        }
        if (!raw_p.empty()) {
            const std::vector<double> adjusted = stats::holm_correct(raw_p);
            for (std::size_t i = 0; i < adjusted.size(); ++i) {
                comparison.pairwise[i].test.p_adjusted = adjusted[i];
            }
        }
        report.by_metric[metric] = std::move(comparison);
    }

    // metric x metric correlations, pairwise-complete over pooled responses
    const std::size_t k = report.metrics.size();
    report.correlations.assign(k, std::vector<std::optional<double>>(k));
    for (std::size_t i = 0; i < k; ++i) {
        report.correlations[i][i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> xs, ys;
            for (const ModelProfile& p : profiles) {
                for (const MetricRow& row : p.rows) {
                    const auto x = lexmetrics::metric_value(row.metrics, report.metrics[i]);
                    const auto y = lexmetrics::metric_value(row.metrics, report.metrics[j]);
                    if (x && y) {
                        xs.push_back(*x);
                        ys.push_back(*y);
                    }
                }
            }
            std::optional<double> r;
            if (xs.size() >= 2) {
                try {
                    r = stats::pearson_r(xs, ys);
                } catch (const DataError&) {
                    r = std::nullopt;
                }
            }
            report.correlations[i][j] = r;
            report.correlations[j][i] = r;
        }
    }
    return report;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    if (name == "svg") return ReportFormat::svg;
    throw InvalidArgument("unknown report format: " + name);
}

nlohmann::json profiles_to_json(std::span<const ModelProfile> profiles) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    nlohmann::json arr = nlohmann::json::array();
    for (const ModelProfile& p : profiles) arr.push_back(profile_to_json(p));
    doc["profiles"] = std::move(arr);
    return doc;
}

std::vector<ModelProfile> profiles_from_json(const nlohmann::json& doc) {
    if (!doc.contains("profiles") || !doc["profiles"].is_array()) {
        throw ParseError("profiles document missing 'profiles' array");
    }
    std::vector<ModelProfile> out;
    for (const auto& p : doc["profiles"]) out.push_back(profile_from_json(p));
    return out;
}

nlohmann::json report_to_json(const ComparisonReport& report,
                              std::span<const ModelProfile> profiles) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["models"] = report.models;
    doc["metrics"] = report.metrics;
    nlohmann::json comparisons = nlohmann::json::object();
    for (const auto& [metric, comparison] : report.by_metric) {
        nlohmann::json c;
        c["degenerate"] = comparison.degenerate;
        c["omnibus"] = comparison.omnibus ? test_to_json(*comparison.omnibus)
                                          : nlohmann::json(nullptr);
        nlohmann::json pairwise = nlohmann::json::array();
        for (const PairwiseResult& pair : comparison.pairwise) {
            nlohmann::json pj;
            pj["model_a"] = pair.model_a;
            pj["model_b"] = pair.model_b;
            pj["test"] = test_to_json(pair.test);
            pairwise.push_back(std::move(pj));
        }
        c["pairwise"] = std::move(pairwise);
        comparisons[metric] = std::move(c);
    }
    doc["comparisons"] = std::move(comparisons);
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : report.correlations) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const auto& v : row) jrow.push_back(opt_json(v));
        matrix.push_back(std::move(jrow));
    }
    doc["correlations"] = std::move(matrix);
    doc["profiles"] = profiles_to_json(profiles)["profiles"];
    return doc;
}

std::pair<ComparisonReport, std::vector<ModelProfile>> report_from_json(const nlohmann::json& doc) {
    ComparisonReport report;
    report.models = doc.at("models").get<std::vector<std::string>>();
    report.metrics = doc.at("metrics").get<std::vector<std::string>>();
    for (const auto& [metric, c] : doc.at("comparisons").items()) {
        MetricComparison comparison;
        comparison.degenerate = c.at("degenerate").get<bool>();
        if (!c.at("omnibus").is_null()) {
            comparison.omnibus = test_from_json(c["omnibus"]);
        }
        for (const auto& pj : c.at("pairwise")) {
            PairwiseResult pair;
            pair.model_a = pj.at("model_a").get<std::string>();
            pair.model_b = pj.at("model_b").get<std::string>();
            pair.test = test_from_json(pj.at("test"));
            comparison.pairwise.push_back(std::move(pair));
        }
        report.by_metric[metric] = std::move(comparison);
    }
    for (const auto& jrow : doc.at("correlations")) {
        std::vector<std::optional<double>> row;
        for (const auto& v : jrow) row.push_back(opt_from_json(v));
        report.correlations.push_back(std::move(row));
    }
    std::vector<ModelProfile> profiles;
    for (const auto& p : doc.at("profiles")) profiles.push_back(profile_from_json(p));
    return {std::move(report), std::move(profiles)};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_json_file(const nlohmann::json& doc, const std::string& path) {
    write_text_file(path, doc.dump(2) + "\n");
}

std::vector<std::string> emit_report(const ComparisonReport& report,
                                     std::span<const ModelProfile> profiles, ReportFormat format,
                                     const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory: " + out_dir);
    }
    const std::filesystem::path dir(out_dir);
    std::vector<std::string> written;

    switch (format) {
        case ReportFormat::json: {
            const std::string path = (dir / "report.json").string();
            write_json_file(report_to_json(report, profiles), path);
            written.push_back(path);
            break;
        }
        case ReportFormat::csv: {
            std::string metrics_csv = lexmetrics::metrics_csv_header() + "\n";
            for (const ModelProfile& p : profiles) {
                for (const MetricRow& row : p.rows) {
                    metrics_csv += lexmetrics::metrics_csv_row(p.model, row.prompt_id, row.metrics);
                    metrics_csv += "\n";
                }
            }
            const std::string metrics_path = (dir / "metrics.csv").string();
            write_text_file(metrics_path, metrics_csv);
            written.push_back(metrics_path);

            std::string tests_csv =
                "metric,kind,model_a,model_b,method,statistic,df,p_value,p_adjusted,"
                "rank_biserial,group_sizes\n";
            auto append_test = [&](const std::string& metric, const std::string& kind,
                                   const std::string& model_a, const std::string& model_b,
                                   const stats::StatTestResult& t) {
                std::string sizes;
                for (std::size_t s : t.group_sizes) {
                    if (!sizes.empty()) sizes.push_back(';');
                    sizes += std::to_string(s);
                }
                tests_csv += metric + "," + kind + "," + model_a + "," + model_b + "," + t.method +
                             "," + fixed6(t.statistic) + "," + std::to_string(t.df) + "," +
                             fixed6(t.p_value) + "," +
                             (t.p_adjusted ? fixed6(*t.p_adjusted) : std::string()) + "," +
                             (t.effect_size ? fixed6(*t.effect_size) : std::string()) + "," +
                             sizes + "\n";
            };
            for (const std::string& metric : report.metrics) {
                const auto it = report.by_metric.find(metric);
                if (it == report.by_metric.end()) continue;
                const MetricComparison& comparison = it->second;
                if (comparison.degenerate) {
                    tests_csv += metric + ",degenerate,,,,,,,,,\n";
                }
                if (comparison.omnibus) {
                    append_test(metric, "omnibus", "", "", *comparison.omnibus);
                }
                for (const PairwiseResult& pair : comparison.pairwise) {
                    append_test(metric, "pairwise", pair.model_a, pair.model_b, pair.test);
                }
            }
            const std::string tests_path = (dir / "tests.csv").string();
            write_text_file(tests_path, tests_csv);
            written.push_back(tests_path);
            break;
        }
        case ReportFormat::svg: {
            const FigureLayout layout;
            const std::string lexical_path = (dir / "fig_lexical.svg").string();
            write_text_file(lexical_path, render_lexical_figure(profiles, layout));
            written.push_back(lexical_path);
            const std::string dist_path = (dir / "fig_distributions.svg").string();
            write_text_file(dist_path, render_distribution_figure(report, profiles, layout));
            written.push_back(dist_path);
            const std::string scatter_path = (dir / "fig_scatter.svg").string();
            write_text_file(scatter_path, render_scatter_figure(report, profiles, layout));
            written.push_back(scatter_path);
            break;
        }
    }
    return written;
}

} // namespace divprof::report
