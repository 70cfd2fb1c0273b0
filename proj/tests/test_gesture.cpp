#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shellforge/gesture.hpp"
#include "shellforge/rng.hpp"

using namespace shellforge;

namespace {

std::vector<FlowSample> motion_burst(std::int64_t t0, int n, int dx, int dy, int dt = 10) {
    std::vector<FlowSample> v;
    for (int i = 0; i < n; ++i) v.push_back({dx, dy, t0 + i * dt});
    return v;
}

Stroke stroke_of(std::vector<FlowSample> samples) {
    Stroke s;
    s.samples = std::move(samples);
    return s;
}

Stroke circle_stroke(int steps, double radius = 80.0) {
    Stroke s;
    int px = static_cast<int>(std::lround(radius)), py = 0;
    for (int i = 1; i <= steps; ++i) {
        double a = 2 * 3.14159265358979323846 * i / steps;
        int qx = static_cast<int>(std::lround(radius * std::cos(a)));
        int qy = static_cast<int>(std::lround(radius * std::sin(a)));
        s.samples.push_back({qx - px, qy - py, i * 10});
        px = qx;
        py = qy;
    }
    return s;
}

}  // namespace

TEST_CASE("segment: continuous motion is one stroke") {
    auto strokes = segment(motion_burst(0, 50, 3, 1));
    REQUIRE(strokes.size() == 1);
    CHECK(strokes[0].samples.size() == 50);
}

TEST_CASE("segment: 400ms stillness splits two bursts at idle 250") {
    std::vector<FlowSample> stream = motion_burst(0, 20, 3, 0);
    auto second = motion_burst(190 + 400, 20, 0, 3);
    stream.insert(stream.end(), second.begin(), second.end());
    auto strokes = segment(stream, 250);
    REQUIRE(strokes.size() == 2);
    CHECK(strokes[0].samples.size() == 20);
    CHECK(strokes[1].samples.size() == 20);
}

TEST_CASE("segment: short pauses stay inside a stroke") {
    std::vector<FlowSample> stream = motion_burst(0, 10, 3, 0);
    for (int i = 0; i < 5; ++i) stream.push_back({0, 0, 90 + 10 + i * 10});  // 50ms lull
    auto tail = motion_burst(190, 10, 3, 0);
    stream.insert(stream.end(), tail.begin(), tail.end());
    auto strokes = segment(stream, 250);
    REQUIRE(strokes.size() == 1);
    CHECK(strokes[0].samples.size() == 25);
}

TEST_CASE("segment: all-zero stream yields nothing; tiny runs dropped") {
    std::vector<FlowSample> zeros;
    for (int i = 0; i < 100; ++i) zeros.push_back({0, 0, i * 10});
    CHECK(segment(zeros).empty());
    CHECK(segment(motion_burst(0, 3, 1, 0)).empty());  // < 4 samples
}

TEST_CASE("featurize: straight-right stroke ends at (1, 0)") {
    auto f = featurize(stroke_of(motion_burst(0, 20, 5, 0)));
    REQUIRE(f.size() == 32);
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[1] == doctest::Approx(0.0));
    CHECK(f[30] == doctest::Approx(1.0));
    CHECK(f[31] == doctest::Approx(0.0));
    for (int k = 0; k < 16; ++k) CHECK(f[2 * k + 1] == doctest::Approx(0.0));
}

TEST_CASE("featurize: invariant to uniform time re-scaling") {
    Stroke a = stroke_of(motion_burst(0, 24, 4, 2, 10));
    Stroke b = stroke_of(motion_burst(0, 24, 4, 2, 5));  // double speed
    auto fa = featurize(a), fb = featurize(b);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i] == fb[i]);
}

TEST_CASE("featurize: invariant to uniform spatial scale") {
    Stroke a = circle_stroke(48, 60.0);
    Stroke b = circle_stroke(48, 120.0);
    auto fa = featurize(a), fb = featurize(b);
    for (std::size_t i = 0; i < fa.size(); ++i)
        CHECK(fa[i] == doctest::Approx(fb[i]).epsilon(0.02));
}

TEST_CASE("featurize: circle consistent under 2x-denser resampling") {
    auto fa = featurize(circle_stroke(60));
    auto fb = featurize(circle_stroke(120));
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(std::abs(fa[i] - fb[i]) < 1e-2);
}

TEST_CASE("featurize: 90-degree rotation permutes the features") {
    Stroke right = stroke_of(motion_burst(0, 20, 5, 0));
    Stroke up = stroke_of(motion_burst(0, 20, 0, 5));
    auto fr = featurize(right), fu = featurize(up);
    for (int k = 0; k < 16; ++k) {
        CHECK(fu[2 * k + 1] == doctest::Approx(fr[2 * k]));  // y(up) = x(right)
        CHECK(fu[2 * k] == doctest::Approx(0.0));
    }
}

TEST_CASE("featurize: motionless stroke rejected") {
    Stroke s = stroke_of({{0, 0, 0}, {0, 0, 10}, {0, 0, 20}, {0, 0, 30}});
    try {
        featurize(s);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroLengthPath);
    }
}

TEST_CASE("train: linearly separable classes reach 100% within 200 epochs") {
    std::vector<Stroke> data;
    for (int i = 0; i < 20; ++i) {
        Stroke r = stroke_of(motion_burst(0, 20 + i % 5, 5, 0));
        r.label = "right";
        data.push_back(r);
        Stroke u = stroke_of(motion_burst(0, 20 + i % 5, 0, 5));
        u.label = "up";
        data.push_back(u);
    }
    TrainConfig config;
    config.epochs = 200;
    config.seed = 11;
    GestureModel m = train(data, config);
    CHECK(m.final_training_accuracy == doctest::Approx(1.0));
    CHECK(m.classes.size() == 2);
}

TEST_CASE("train: bit-reproducible for a fixed seed") {
    std::vector<Stroke> data = synth_corpus(6, 0.1, 77);
    TrainConfig config;
    config.epochs = 60;
    config.seed = 1234;
    GestureModel a = train(data, config);
    GestureModel b = train(data, config);
    REQUIRE(a.w1.size() == b.w1.size());
    bool identical = true;
    for (std::size_t i = 0; i < a.w1.size(); ++i)
        if (a.w1[i] != b.w1[i]) identical = false;
    for (std::size_t i = 0; i < a.w2.size(); ++i)
        if (a.w2[i] != b.w2[i]) identical = false;
    CHECK(identical);
    CHECK(a.final_training_accuracy == b.final_training_accuracy);
}

TEST_CASE("train: insufficient data rejected") {
    std::vector<Stroke> data;
    Stroke s = stroke_of(motion_burst(0, 10, 5, 0));
    s.label = "only";
    data.push_back(s);
    try {
        train(data, TrainConfig{.seed = 1});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
}

TEST_CASE("classify: memorizes separable training samples; zero weights are uniform") {
    std::vector<Stroke> data = synth_corpus(8, 0.05, 31);
    TrainConfig config;
    config.epochs = 300;
    config.seed = 5;
    GestureModel m = train(data, config);
    int correct = 0;
    for (const Stroke& s : data)
        if (classify(m, s).label == s.label) ++correct;
    CHECK(static_cast<double>(correct) / data.size() >= 0.99);

    GestureModel flat = m;
    std::fill(flat.w1.begin(), flat.w1.end(), 0.0);
    std::fill(flat.b1.begin(), flat.b1.end(), 0.0);
    std::fill(flat.w2.begin(), flat.w2.end(), 0.0);
    std::fill(flat.b2.begin(), flat.b2.end(), 0.0);
    Classification c = classify(flat, data[0]);
    CHECK(c.confidence == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("classify: device mismatch refused") {
    std::vector<Stroke> data = synth_corpus(6, 0.05, 13, "device-A");
    TrainConfig config;
    config.epochs = 50;
    config.seed = 2;
    config.device_id = "device-A";
    GestureModel m = train(data, config);

    Stroke other = data[0];
    other.device_id = "device-B";
    try {
        classify(m, other);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DeviceMismatch);
    }
    Stroke fine = data[0];
    fine.device_id = "device-A";
    CHECK(!classify(m, fine).label.empty());
}

TEST_CASE("softmax outputs sum to one") {
    std::vector<Stroke> data = synth_corpus(5, 0.1, 99);
    TrainConfig config;
    config.epochs = 30;
    config.seed = 3;
    GestureModel m = train(data, config);
    for (int i = 0; i < 10; ++i) {
        auto probs = model_forward(m, featurize(data[i * 2]));
        double sum = 0.0;
        for (double p : probs) sum += p;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("gradients: backprop matches central finite differences to 1e-4") {
    std::vector<Stroke> data = synth_corpus(4, 0.12, 55);
    TrainConfig config;
    config.epochs = 5;
    config.seed = 8;
    GestureModel m = train(data, config);

    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (const Stroke& s : data) {
        X.push_back(featurize(s));
        y.push_back(static_cast<int>(std::find(m.classes.begin(), m.classes.end(), s.label) -
                                     m.classes.begin()));
    }
    std::vector<double> gw1, gb1, gw2, gb2;
    model_gradients(m, X, y, gw1, gb1, gw2, gb2);

    Rng rng(4242);
    const double h = 1e-6;
    auto probe = [&](std::vector<double>& weights, const std::vector<double>& grads) {
        for (int trial = 0; trial < 10; ++trial) {
            std::size_t i = static_cast<std::size_t>(rng.uniform_index(weights.size()));
            double keep = weights[i];
            weights[i] = keep + h;
            double up = model_loss(m, X, y);
            weights[i] = keep - h;
            double down = model_loss(m, X, y);
            weights[i] = keep;
            double numeric = (up - down) / (2 * h);
            double denom = std::max({std::abs(numeric), std::abs(grads[i]), 1e-8});
            CHECK(std::abs(numeric - grads[i]) / denom < 1e-4);
        }
    };
    probe(m.w1, gw1);
    probe(m.b1, gb1);
    probe(m.w2, gw2);
    probe(m.b2, gb2);
}

TEST_CASE("synth: zero noise reproduces the template features exactly") {
    std::vector<Stroke> corpus = synth_corpus(3, 0.0, 21);
    // All samples of one class featurize identically.
    for (const std::string& cls : default_gesture_classes()) {
        std::vector<std::vector<double>> feats;
        for (const Stroke& s : corpus)
            if (s.label == cls) feats.push_back(featurize(s));
        REQUIRE(feats.size() == 3);
        for (std::size_t i = 1; i < feats.size(); ++i)
            for (std::size_t k = 0; k < feats[0].size(); ++k)
                CHECK(feats[i][k] == feats[0][k]);
    }
}

TEST_CASE("synth: reproducible per seed, different across seeds") {
    auto a = synth_corpus(4, 0.15, 100);
    auto b = synth_corpus(4, 0.15, 100);
    auto c = synth_corpus(4, 0.15, 101);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].samples.size() != b[i].samples.size()) same = false;
        for (std::size_t k = 0; same && k < a[i].samples.size(); ++k)
            if (a[i].samples[k].dx != b[i].samples[k].dx ||
                a[i].samples[k].dy != b[i].samples[k].dy)
                same = false;
        if (a[i].samples.size() != c[i].samples.size()) {
            differs = true;
        } else {
            for (std::size_t k = 0; k < a[i].samples.size(); ++k)
                if (a[i].samples[k].dx != c[i].samples[k].dx) differs = true;
        }
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("synth: classes separable but not trivially so at default noise") {
    std::vector<Stroke> corpus = synth_corpus(20, 0.15, 7);
    std::vector<std::string> classes = default_gesture_classes();
    std::vector<std::vector<std::vector<double>>> feats(classes.size());
    for (const Stroke& s : corpus) {
        std::size_t c = std::find(classes.begin(), classes.end(), s.label) - classes.begin();
        feats[c].push_back(featurize(s));
    }
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(d);
    };
    double within = 0.0, between = 0.0;
    int nw = 0, nb = 0;
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (std::size_t i = 0; i < feats[c].size(); ++i)
            for (std::size_t j = i + 1; j < feats[c].size(); ++j) {
                within += dist(feats[c][i], feats[c][j]);
                ++nw;
            }
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (std::size_t d2 = c + 1; d2 < classes.size(); ++d2)
            for (const auto& fa : feats[c])
                for (const auto& fb : feats[d2]) {
                    between += dist(fa, fb);
                    ++nb;
                }
    within /= nw;
    between /= nb;
    CHECK(between >= 3.0 * within);
    CHECK(within > 0.01);  // noise actually does something
}

TEST_CASE("check_geometry: small open hole, shipped design, deep cover") {
    auto v1 = check_geometry({5.0, false, 0.0, 0.0});
    REQUIRE(v1.size() == 2);
    CHECK(v1[0].code == "UncoveredHole");
    CHECK(v1[1].code == "WindowTooSmall");

    auto v2 = check_geometry({14.0, true, 2.0, 0.0});
    CHECK(v2.empty());

    auto v3 = check_geometry({14.0, true, 2.0, 1.0});  // surface 3mm from lens
    REQUIRE(v3.size() == 1);
    CHECK(v3[0].code == "OutOfDepthOfField");
}

TEST_CASE("stroke files: labeled round trip with headers and blanks") {
    std::vector<Stroke> corpus = synth_corpus(2, 0.1, 17, "dev-7");
    std::string text = strokes_to_jsonl(corpus);
    std::vector<Stroke> back = strokes_from_jsonl(text);
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(back[i].label == corpus[i].label);
        CHECK(back[i].device_id == "dev-7");
        REQUIRE(back[i].samples.size() == corpus[i].samples.size());
        CHECK(back[i].samples[3].dx == corpus[i].samples[3].dx);
        CHECK(back[i].samples[3].t == corpus[i].samples[3].t);
    }
}

TEST_CASE("model files: versioned round trip") {
    std::vector<Stroke> data = synth_corpus(5, 0.08, 3, "dev-x");
    TrainConfig config;
    config.epochs = 40;
    config.seed = 77;
    config.device_id = "dev-x";
    GestureModel m = train(data, config);
    GestureModel back = model_from_json_text(model_to_json_text(m));
    CHECK(back.classes == m.classes);
    CHECK(back.training.device_id == "dev-x");
    REQUIRE(back.w1.size() == m.w1.size());
    for (std::size_t i = 0; i < m.w1.size(); ++i) CHECK(back.w1[i] == m.w1[i]);
    // Same predictions after the round trip.
    for (int i = 0; i < 5; ++i)
        CHECK(classify(back, data[i]).label == classify(m, data[i]).label);

    try {
        model_from_json_text("{\"format\": \"something-else\"}");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedFeature);
    }
}

TEST_CASE("benchmark: 6x20 corpus, 5 splits, mean held-out accuracy >= 89%") {
    EvalResult r = evaluate_synthetic(7, 20, 0.15, 5);
    CHECK(r.total_samples == 120);
    REQUIRE(r.split_accuracy.size() == 5);
    CHECK(r.mean_accuracy >= 0.89);
    MESSAGE("mean accuracy: ", r.mean_accuracy);
}
