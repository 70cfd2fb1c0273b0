#include "shellforge/gesture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shellforge/rng.hpp"

namespace shellforge {

using nlohmann::json;

// --- segmentation -----------------------------------------------------------

std::vector<Stroke> segment(const std::vector<FlowSample>& stream, int idle_ms) {
    if (idle_ms <= 0) throw Error(ErrorCode::UsageError, "idle_ms must be positive");
    std::vector<Stroke> strokes;
    Stroke current;
    std::int64_t last_motion_t = 0;
    std::vector<FlowSample> pending_zeros;

    auto close = [&] {
        if (current.samples.size() >= 4) strokes.push_back(std::move(current));
        current = Stroke{};
        pending_zeros.clear();
    };

    for (const FlowSample& s : stream) {
        bool motion = s.dx != 0 || s.dy != 0;
        if (!motion) {
            if (current.samples.empty()) continue;  // leading stillness
            if (s.t - last_motion_t >= idle_ms) {
                close();
            } else {
                pending_zeros.push_back(s);
            }
            continue;
        }
        if (!current.samples.empty() && s.t - last_motion_t >= idle_ms) close();
        // Short pauses stay inside the stroke.
        current.samples.insert(current.samples.end(), pending_zeros.begin(),
                               pending_zeros.end());
        pending_zeros.clear();
        current.samples.push_back(s);
        last_motion_t = s.t;
    }
    close();
    return strokes;
}

// --- features ----------------------------------------------------------------

std::vector<double> featurize(const Stroke& stroke) {
    const int points = 16;
    if (stroke.samples.empty()) throw Error(ErrorCode::ZeroLengthPath, "empty stroke");

    // Integrate displacements into a path from the origin.
    std::vector<double> px{0.0}, py{0.0};
    px.reserve(stroke.samples.size() + 1);
    py.reserve(stroke.samples.size() + 1);
    for (const FlowSample& s : stroke.samples) {
        px.push_back(px.back() + s.dx);
        py.push_back(py.back() + s.dy);
    }
    std::vector<double> arc(px.size(), 0.0);
    for (std::size_t i = 1; i < px.size(); ++i)
        arc[i] = arc[i - 1] + std::hypot(px[i] - px[i - 1], py[i] - py[i - 1]);
    double total = arc.back();
    if (total <= 0.0)
        throw Error(ErrorCode::ZeroLengthPath, "stroke has no net displacement anywhere");

    // Equidistant resampling along arc length, endpoints included.
    std::vector<double> rx(points), ry(points);
    std::size_t seg = 0;
    for (int k = 0; k < points; ++k) {
        double s = total * k / (points - 1);
        while (seg + 1 < arc.size() - 1 && arc[seg + 1] < s) ++seg;
        double span = arc[seg + 1] - arc[seg];
        double t = span > 0 ? (s - arc[seg]) / span : 0.0;
        rx[k] = px[seg] + t * (px[seg + 1] - px[seg]);
        ry[k] = py[seg] + t * (py[seg + 1] - py[seg]);
    }

    double min_x = rx[0], max_x = rx[0], min_y = ry[0], max_y = ry[0];
    for (int k = 0; k < points; ++k) {
        min_x = std::min(min_x, rx[k]);
        max_x = std::max(max_x, rx[k]);
        min_y = std::min(min_y, ry[k]);
        max_y = std::max(max_y, ry[k]);
    }
    double scale = std::max(max_x - min_x, max_y - min_y);
    if (scale <= 0.0) throw Error(ErrorCode::ZeroLengthPath, "degenerate path extent");

    std::vector<double> features(2 * points);
    for (int k = 0; k < points; ++k) {
        features[2 * k] = (rx[k] - rx[0]) / scale;
        features[2 * k + 1] = (ry[k] - ry[0]) / scale;
    }
    return features;
}

// --- MLP ----------------------------------------------------------------------

namespace {

void forward_layers(const GestureModel& m, const std::vector<double>& x,
                    std::vector<double>& hidden_out, std::vector<double>& probs) {
    const int H = m.hidden, D = m.input_dim;
    const int C = static_cast<int>(m.classes.size());
    hidden_out.resize(H);
    for (int h = 0; h < H; ++h) {
        double a = m.b1[h];
        const double* row = &m.w1[static_cast<std::size_t>(h) * D];
        for (int d = 0; d < D; ++d) a += row[d] * x[d];
        hidden_out[h] = std::tanh(a);
    }
    probs.resize(C);
    double max_logit = -1e300;
    for (int c = 0; c < C; ++c) {
        double a = m.b2[c];
        const double* row = &m.w2[static_cast<std::size_t>(c) * H];
        for (int h = 0; h < H; ++h) a += row[h] * hidden_out[h];
        probs[c] = a;
        max_logit = std::max(max_logit, a);
    }
    double sum = 0.0;
    for (int c = 0; c < C; ++c) {
        probs[c] = std::exp(probs[c] - max_logit);
        sum += probs[c];
    }
    for (int c = 0; c < C; ++c) probs[c] /= sum;
}

}  // namespace

std::vector<double> model_forward(const GestureModel& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.input_dim)
        throw Error(ErrorCode::DimensionMismatch,
                    "feature vector has " + std::to_string(x.size()) + " values, model expects " +
                        std::to_string(m.input_dim));
    std::vector<double> hidden_out, probs;
    forward_layers(m, x, hidden_out, probs);
    return probs;
}

double model_loss(const GestureModel& m, const std::vector<std::vector<double>>& features,
                  const std::vector<int>& labels) {
    double loss = 0.0;
    std::vector<double> hidden_out, probs;
    for (std::size_t n = 0; n < features.size(); ++n) {
        forward_layers(m, features[n], hidden_out, probs);
        loss -= std::log(std::max(probs[labels[n]], 1e-300));
    }
    return loss / static_cast<double>(features.size());
}

void model_gradients(const GestureModel& m, const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels, std::vector<double>& gw1,
                     std::vector<double>& gb1, std::vector<double>& gw2,
                     std::vector<double>& gb2) {
    const int H = m.hidden, D = m.input_dim;
    const int C = static_cast<int>(m.classes.size());
    gw1.assign(m.w1.size(), 0.0);
    gb1.assign(m.b1.size(), 0.0);
    gw2.assign(m.w2.size(), 0.0);
    gb2.assign(m.b2.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(features.size());

    std::vector<double> hidden_out, probs, dh(H);
    for (std::size_t n = 0; n < features.size(); ++n) {
        const std::vector<double>& x = features[n];
        forward_layers(m, x, hidden_out, probs);
        // d(loss)/d(logit_c) = p_c - 1{c == y}
        for (int c = 0; c < C; ++c) {
            double delta = (probs[c] - (c == labels[n] ? 1.0 : 0.0)) * inv_n;
            gb2[c] += delta;
            double* grow = &gw2[static_cast<std::size_t>(c) * H];
            const double* wrow = &m.w2[static_cast<std::size_t>(c) * H];
            for (int h = 0; h < H; ++h) grow[h] += delta * hidden_out[h];
            (void)wrow;
        }
        for (int h = 0; h < H; ++h) {
            double back = 0.0;
            for (int c = 0; c < C; ++c)
                back += (probs[c] - (c == labels[n] ? 1.0 : 0.0)) *
                        m.w2[static_cast<std::size_t>(c) * H + h];
            dh[h] = back * (1.0 - hidden_out[h] * hidden_out[h]) * inv_n;
        }
        for (int h = 0; h < H; ++h) {
            gb1[h] += dh[h];
            double* grow = &gw1[static_cast<std::size_t>(h) * D];
            for (int d = 0; d < D; ++d) grow[d] += dh[h] * x[d];
        }
    }
}

GestureModel train(const std::vector<Stroke>& data, const TrainConfig& config) {
    if (config.hidden <= 0 || config.epochs <= 0 || config.learning_rate <= 0)
        throw Error(ErrorCode::UsageError, "invalid training configuration");

    std::vector<std::vector<double>> features;
    std::vector<std::string> labels;
    for (const Stroke& s : data) {
        if (s.label.empty()) continue;
        try {
            features.push_back(featurize(s));
            labels.push_back(s.label);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroLengthPath) throw;  // skip motionless strokes
        }
    }

    GestureModel m;
    for (const std::string& l : labels)
        if (std::find(m.classes.begin(), m.classes.end(), l) == m.classes.end())
            m.classes.push_back(l);
    std::sort(m.classes.begin(), m.classes.end());
    if (m.classes.size() < 2)
        throw Error(ErrorCode::InsufficientData, "need at least 2 classes, have " +
                                                     std::to_string(m.classes.size()));
    std::vector<int> y(labels.size());
    std::vector<int> per_class(m.classes.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = static_cast<int>(std::find(m.classes.begin(), m.classes.end(), labels[i]) -
                                m.classes.begin());
        ++per_class[y[i]];
    }
    for (std::size_t c = 0; c < per_class.size(); ++c)
        if (per_class[c] < 4)
            throw Error(ErrorCode::InsufficientData,
                        "class '" + m.classes[c] + "' has " + std::to_string(per_class[c]) +
                            " samples, need 4");

    const int C = static_cast<int>(m.classes.size());
    m.hidden = config.hidden;
    m.training = config;
    Rng rng(config.seed);
    m.w1.resize(static_cast<std::size_t>(m.hidden) * m.input_dim);
    m.b1.resize(m.hidden);
    m.w2.resize(static_cast<std::size_t>(C) * m.hidden);
    m.b2.resize(C);
    for (auto& w : m.w1) w = rng.uniform(-0.5, 0.5);
    for (auto& w : m.b1) w = rng.uniform(-0.5, 0.5);
    for (auto& w : m.w2) w = rng.uniform(-0.5, 0.5);
    for (auto& w : m.b2) w = rng.uniform(-0.5, 0.5);

    std::vector<double> gw1, gb1, gw2, gb2;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        model_gradients(m, features, y, gw1, gb1, gw2, gb2);
        for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= config.learning_rate * gw1[i];
        for (std::size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= config.learning_rate * gb1[i];
        for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= config.learning_rate * gw2[i];
        for (std::size_t i = 0; i < m.b2.size(); ++i) m.b2[i] -= config.learning_rate * gb2[i];
        double loss = model_loss(m, features, y);
        if (!std::isfinite(loss))
            throw Error(ErrorCode::NonFiniteLoss,
                        "training diverged at epoch " + std::to_string(epoch));
    }

    int correct = 0;
    std::vector<double> hidden_out, probs;
    for (std::size_t n = 0; n < features.size(); ++n) {
        forward_layers(m, features[n], hidden_out, probs);
        int arg = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        if (arg == y[n]) ++correct;
    }
    m.final_training_accuracy = static_cast<double>(correct) / features.size();
    return m;
}

Classification classify(const GestureModel& model, const Stroke& stroke) {
    if (!stroke.device_id.empty() && stroke.device_id != model.training.device_id)
        throw Error(ErrorCode::DeviceMismatch,
                    "model was trained for device '" + model.training.device_id +
                        "', stroke declares '" + stroke.device_id +
                        "'; classifiers do not transfer between devices");
    std::vector<double> probs = model_forward(model, featurize(stroke));
    int arg = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    return {model.classes[arg], probs[arg]};
}

// --- sensor geometry -----------------------------------------------------------

std::vector<GeometryViolation> check_geometry(const WindowDesign& design,
                                              const SensorGeometry& sensor) {
    std::vector<GeometryViolation> out;
    if (!design.cover_present) {
        out.push_back({"UncoveredHole",
                       "open hole: fingertip skin bulges into it by an amount that varies with "
                       "pressure, so the surface cannot stay at the sensing distance"});
    } else {
        double distance = design.standoff + design.cover_thickness;
        if (distance < sensor.depth_of_field_min || distance > sensor.depth_of_field_max) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "finger surface sits %.2f mm from the lens, outside the %.1f-%.1f mm "
                          "depth of field",
                          distance, sensor.depth_of_field_min, sensor.depth_of_field_max);
            out.push_back({"OutOfDepthOfField", buf});
        }
    }
    if (design.hole_diameter < sensor.accurate_diameter) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%.1f mm opening is below the %.1f mm diameter the sensor tracks "
                      "accurately; small holes do not support gesture capture",
                      design.hole_diameter, sensor.accurate_diameter);
        out.push_back({"WindowTooSmall", buf});
    }
    return out;
}

// --- synthetic corpus ------------------------------------------------------------

std::vector<std::string> default_gesture_classes() {
    return {"circle-ccw", "circle-cw", "swipe-down", "swipe-left", "swipe-right", "swipe-up"};
}

namespace {

std::vector<FlowSample> template_ticks(const std::string& name) {
    std::vector<FlowSample> ticks;
    auto push = [&](int dx, int dy) {
        ticks.push_back({dx, dy, static_cast<std::int64_t>(ticks.size()) * 10});
    };
    if (name == "swipe-right") {
        for (int i = 0; i < 40; ++i) push(5, 0);
    } else if (name == "swipe-left") {
        for (int i = 0; i < 40; ++i) push(-5, 0);
    } else if (name == "swipe-up") {
        for (int i = 0; i < 40; ++i) push(0, 5);
    } else if (name == "swipe-down") {
        for (int i = 0; i < 40; ++i) push(0, -5);
    } else if (name == "circle-ccw" || name == "circle-cw") {
        double dir = name == "circle-ccw" ? 1.0 : -1.0;
        const double r = 100.0;
        int px = static_cast<int>(std::lround(r)), py = 0;
        for (int i = 1; i <= 48; ++i) {
            double a = dir * 2.0 * 3.14159265358979323846 * i / 48;
            int qx = static_cast<int>(std::lround(r * std::cos(a)));
            int qy = static_cast<int>(std::lround(r * std::sin(a)));
            push(qx - px, qy - py);
            px = qx;
            py = qy;
        }
    } else {
        throw Error(ErrorCode::UsageError, "unknown gesture template '" + name + "'");
    }
    return ticks;
}

// Two-pass moving average; cheap low-pass for the noise field.
void smooth_inplace(std::vector<double>& v, int window) {
    if (window < 2) return;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> out(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            double sum = 0.0;
            int count = 0;
            for (int k = -window; k <= window; ++k) {
                std::int64_t j = static_cast<std::int64_t>(i) + k;
                if (j < 0 || j >= static_cast<std::int64_t>(v.size())) continue;
                sum += v[j];
                ++count;
            }
            out[i] = sum / count;
        }
        v = std::move(out);
    }
}

}  // namespace

std::vector<Stroke> synth_corpus(int n_per_class, double noise_sigma, std::uint64_t seed,
                                 const std::string& device_id) {
    if (n_per_class < 1) throw Error(ErrorCode::UsageError, "n_per_class must be >= 1");
    std::vector<std::string> classes = default_gesture_classes();
    std::vector<Stroke> corpus;
    corpus.reserve(classes.size() * n_per_class);

    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<FlowSample> ticks = template_ticks(classes[c]);
        for (int s = 0; s < n_per_class; ++s) {
            Rng rng(derive_seed(seed, c * 10000 + s));
            Stroke stroke;
            stroke.label = classes[c];
            stroke.device_id = device_id;
            double speed = rng.uniform(0.7, 1.4);

            if (noise_sigma <= 0.0) {
                stroke.samples = ticks;
                for (std::size_t i = 0; i < stroke.samples.size(); ++i)
                    stroke.samples[i].t = static_cast<std::int64_t>(std::lround(i * 10.0 / speed));
                corpus.push_back(std::move(stroke));
                continue;
            }

            // Template positions, rotated a little (hand orientation jitter),
            // smoothly warped and noised, requantized to integer counts.
            std::size_t n = ticks.size() + 1;
            std::vector<double> px(n, 0.0), py(n, 0.0);
            for (std::size_t i = 1; i < n; ++i) {
                px[i] = px[i - 1] + ticks[i - 1].dx;
                py[i] = py[i - 1] + ticks[i - 1].dy;
            }
            // Orientation jitter from a two-population mixture: a tidy
            // majority and a sloppy minority whose strokes drift toward the
            // neighboring class, the way a mixed group of people draws.
            double severity = noise_sigma / 0.15;
            double mag = rng.uniform() < 0.14
                             ? (0.59 + 0.72 * rng.uniform()) * severity   // 34..75 degrees
                             : 0.14 * rng.uniform() * severity;           // up to 8 degrees
            double rot = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag;
            double cr = std::cos(rot), sr = std::sin(rot);
            for (std::size_t i = 0; i < n; ++i) {
                double x = px[i] * cr - py[i] * sr;
                double y = px[i] * sr + py[i] * cr;
                px[i] = x;
                py[i] = y;
            }
            double min_x = *std::min_element(px.begin(), px.end());
            double max_x = *std::max_element(px.begin(), px.end());
            double min_y = *std::min_element(py.begin(), py.end());
            double max_y = *std::max_element(py.begin(), py.end());
            double span = std::max(max_x - min_x, max_y - min_y);

            std::vector<double> nx(n), ny(n);
            for (std::size_t i = 0; i < n; ++i) {
                nx[i] = rng.gaussian();
                ny[i] = rng.gaussian();
            }
            int window = std::max(2, static_cast<int>(n) / 6);
            smooth_inplace(nx, window);
            smooth_inplace(ny, window);
            // The moving average shrinks the variance; rescale to sigma.
            double amp = 0.5 * noise_sigma * span * std::sqrt(static_cast<double>(2 * window));
            // Mild speed redistribution along the path.
            double warp = rng.uniform(-0.25, 0.25);
            int qx = 0, qy = 0;
            std::int64_t t = 0;
            for (std::size_t i = 1; i < n; ++i) {
                double u = static_cast<double>(i) / (n - 1);
                double w = u + warp * std::sin(3.14159265358979323846 * u) / 3.0;
                double fi = w * (n - 1);
                std::size_t j = std::min(n - 2, static_cast<std::size_t>(fi));
                double ft = fi - j;
                double x = px[j] + ft * (px[j + 1] - px[j]) + amp * nx[i];
                double y = py[j] + ft * (py[j + 1] - py[j]) + amp * ny[i];
                int ix = static_cast<int>(std::lround(x));
                int iy = static_cast<int>(std::lround(y));
                t += static_cast<std::int64_t>(std::lround(10.0 / speed));
                stroke.samples.push_back({ix - qx, iy - qy, t});
                qx = ix;
                qy = iy;
            }
            corpus.push_back(std::move(stroke));
        }
    }
    return corpus;
}

EvalResult evaluate_synthetic(std::uint64_t seed, int n_per_class, double noise_sigma,
                              int splits, const TrainConfig* base_config) {
    std::vector<Stroke> corpus = synth_corpus(n_per_class, noise_sigma, seed);
    std::vector<std::string> classes = default_gesture_classes();

    EvalResult result;
    result.total_samples = static_cast<int>(corpus.size());
    for (int s = 0; s < splits; ++s) {
        Rng rng(derive_seed(seed, 5000 + s));
        std::vector<Stroke> train_set, test_set;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < corpus.size(); ++i)
                if (corpus[i].label == classes[c]) idx.push_back(i);
            rng.shuffle(idx);
            std::size_t train_count = idx.size() - idx.size() / 5;  // 80/20
            for (std::size_t i = 0; i < idx.size(); ++i)
                (i < train_count ? train_set : test_set).push_back(corpus[idx[i]]);
        }
        TrainConfig config;
        if (base_config) config = *base_config;
        config.seed = derive_seed(seed, 9000 + s);
        GestureModel model = train(train_set, config);
        int correct = 0;
        for (const Stroke& stroke : test_set)
            if (classify(model, stroke).label == stroke.label) ++correct;
        result.split_accuracy.push_back(static_cast<double>(correct) / test_set.size());
    }
    for (double a : result.split_accuracy) result.mean_accuracy += a;
    result.mean_accuracy /= result.split_accuracy.size();
    return result;
}

// --- stroke and model files ------------------------------------------------------

std::string strokes_to_jsonl(const std::vector<Stroke>& strokes) {
    std::string out;
    for (const Stroke& s : strokes) {
        if (!s.label.empty() || !s.device_id.empty()) {
            json header;
            if (!s.label.empty()) header["label"] = s.label;
            if (!s.device_id.empty()) header["device"] = s.device_id;
            out += header.dump() + "\n";
        }
        for (const FlowSample& f : s.samples) {
            json line = {{"dx", f.dx}, {"dy", f.dy}, {"t", f.t}};
            out += line.dump() + "\n";
        }
        out += "\n";
    }
    return out;
}

std::vector<Stroke> strokes_from_jsonl(const std::string& text) {
    std::vector<Stroke> strokes;
    Stroke current;
    bool any_content = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (any_content && !current.samples.empty()) strokes.push_back(current);
        current = Stroke{};
        any_content = false;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) {
            flush();
            continue;
        }
        json j = json::parse(trimmed, nullptr, false);
        if (j.is_discarded())
            throw Error(ErrorCode::MalformedRecord,
                        "stroke file line " + std::to_string(line_no) + " is not JSON");
        if (j.contains("dx")) {
            FlowSample s;
            s.dx = j.at("dx").get<int>();
            s.dy = j.at("dy").get<int>();
            s.t = j.value("t", static_cast<std::int64_t>(current.samples.size() * 10));
            if (!current.samples.empty() && s.t <= current.samples.back().t)
                throw Error(ErrorCode::MalformedRecord,
                            "timestamps must increase (line " + std::to_string(line_no) + ")");
            current.samples.push_back(s);
            any_content = true;
        } else {
            if (any_content) flush();
            current.label = j.value("label", "");
            current.device_id = j.value("device", "");
            any_content = true;
        }
    }
    flush();
    return strokes;
}

std::vector<Stroke> load_strokes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return strokes_from_jsonl(ss.str());
}

void save_strokes(const std::vector<Stroke>& strokes, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << strokes_to_jsonl(strokes);
}

std::string model_to_json_text(const GestureModel& m) {
    json j;
    j["format"] = "gesture-model/1";
    j["classes"] = m.classes;
    j["input_dim"] = m.input_dim;
    j["hidden"] = m.hidden;
    j["feature_points"] = m.feature_points;
    j["w1"] = m.w1;
    j["b1"] = m.b1;
    j["w2"] = m.w2;
    j["b2"] = m.b2;
    j["training"] = {{"seed", m.training.seed},
                     {"epochs", m.training.epochs},
                     {"learning_rate", m.training.learning_rate},
                     {"device_id", m.training.device_id},
                     {"final_accuracy", m.final_training_accuracy}};
    return j.dump(2);
}

GestureModel model_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedRecord, "model file is not JSON");
    if (j.value("format", "") != "gesture-model/1")
        throw Error(ErrorCode::UnsupportedFeature,
                    "unknown model format tag '" + j.value("format", "") + "'");
    GestureModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden = j.at("hidden").get<int>();
    m.feature_points = j.value("feature_points", 16);
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();
    const json& t = j.at("training");
    m.training.seed = t.value("seed", 0ULL);
    m.training.epochs = t.value("epochs", 0);
    m.training.learning_rate = t.value("learning_rate", 0.0);
    m.training.device_id = t.value("device_id", "default");
    m.final_training_accuracy = t.value("final_accuracy", 0.0);
    if (m.w1.size() != static_cast<std::size_t>(m.hidden) * m.input_dim ||
        m.w2.size() != m.classes.size() * static_cast<std::size_t>(m.hidden))
        throw Error(ErrorCode::MalformedRecord, "model weight arrays have the wrong shape");
    return m;
}

GestureModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

void save_model(const GestureModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << model_to_json_text(model) << "\n";
}

}  // namespace shellforge
