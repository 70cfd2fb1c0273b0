// Optical-flow stroke capture, sensor-geometry checks, and the gesture
// classifier: a 20-hidden-unit MLP trained with plain backpropagation.
// Classifiers are per-device; a model refuses strokes from another device.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shellforge/error.hpp"

namespace shellforge {

struct FlowSample {
    int dx = 0;             // displacement counts
    int dy = 0;
    std::int64_t t = 0;     // milliseconds since stream start, strictly increasing
};

struct Stroke {
    std::vector<FlowSample> samples;
    std::string label;      // empty when unlabeled
    std::string device_id;  // empty when undeclared
};

struct SensorGeometry {
    double window_diameter = 14.0;
    double accurate_diameter = 13.0;
    double depth_of_field_min = 1.4;
    double depth_of_field_max = 2.1;
    double optimal_distance = 2.0;
    double tilt_deg = 10.0;
    double cover_thickness = 2.0;
};

struct WindowDesign {
    double hole_diameter = 14.0;
    bool cover_present = true;
    double cover_thickness = 2.0;
    double standoff = 0.0;  // lens to the underside of the cover (or surface)
};

struct GeometryViolation {
    std::string code;  // UncoveredHole | OutOfDepthOfField | WindowTooSmall
    std::string message;
};

struct TrainConfig {
    int hidden = 20;  // fixed by design; override only deliberately
    int epochs = 500;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;  // mandatory: no wall-clock seeding anywhere
    std::string device_id = "default";
};

struct GestureModel {
    std::vector<std::string> classes;  // ordered
    int input_dim = 32;
    int hidden = 20;
    int feature_points = 16;  // arc-length resampling count (normalization)
    std::vector<double> w1, b1;  // [hidden][input_dim] row-major, [hidden]
    std::vector<double> w2, b2;  // [classes][hidden] row-major, [classes]
    TrainConfig training;
    double final_training_accuracy = 0.0;
};

struct Classification {
    std::string label;
    double confidence = 0.0;  // winning softmax probability
};

// Maximal runs of motion: a stroke ends when zero displacement persists for
// idle_ms. Strokes with fewer than 4 samples are discarded.
std::vector<Stroke> segment(const std::vector<FlowSample>& stream, int idle_ms = 250);

// Path integral of the displacements, resampled to 16 points by arc length,
// start at the origin, scaled by the bounding-box long side; 32 interleaved
// x,y values. Throws Error(ZeroLengthPath) for motionless strokes.
std::vector<double> featurize(const Stroke& stroke);

// Forward pass / loss / gradients are exposed so tests can check the
// backpropagation against finite differences.
std::vector<double> model_forward(const GestureModel& m, const std::vector<double>& features);
double model_loss(const GestureModel& m, const std::vector<std::vector<double>>& features,
                  const std::vector<int>& labels);
void model_gradients(const GestureModel& m, const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels, std::vector<double>& gw1,
                     std::vector<double>& gb1, std::vector<double>& gw2,
                     std::vector<double>& gb2);

// Full-batch gradient descent, weights uniform in [-0.5, 0.5] from the seed;
// bit-reproducible. Throws InsufficientData / NonFiniteLoss.
GestureModel train(const std::vector<Stroke>& data, const TrainConfig& config);

// Argmax with softmax confidence. Throws DimensionMismatch on feature size,
// DeviceMismatch when the stroke declares a different device.
Classification classify(const GestureModel& model, const Stroke& stroke);

std::vector<GeometryViolation> check_geometry(const WindowDesign& design,
                                              const SensorGeometry& sensor = {});

// Synthetic corpus for benchmarks: template paths with smooth noise, random
// speed profiles, quantized to integer counts; deterministic per seed.
// Default templates: swipe-left/right/up/down, circle-cw/ccw.
std::vector<std::string> default_gesture_classes();
std::vector<Stroke> synth_corpus(int n_per_class, double noise_sigma, std::uint64_t seed,
                                 const std::string& device_id = "default");

struct EvalResult {
    std::vector<double> split_accuracy;
    double mean_accuracy = 0.0;
    int total_samples = 0;
};

// Stratified random 80/20 splits over a synthetic corpus, one model per
// split; the reproducible benchmark behind the accuracy gate.
EvalResult evaluate_synthetic(std::uint64_t seed, int n_per_class = 20,
                              double noise_sigma = 0.15, int splits = 5,
                              const TrainConfig* base_config = nullptr);

// JSON-lines stroke files: one {"dx":..,"dy":..,"t":..} per line, blank line
// between strokes, optional {"label":..,"device":..} header per stroke.
std::string strokes_to_jsonl(const std::vector<Stroke>& strokes);
std::vector<Stroke> strokes_from_jsonl(const std::string& text);
std::vector<Stroke> load_strokes(const std::string& path);
void save_strokes(const std::vector<Stroke>& strokes, const std::string& path);

// Model files: a single versioned JSON document.
std::string model_to_json_text(const GestureModel& model);
GestureModel model_from_json_text(const std::string& text);
GestureModel load_model(const std::string& path);
void save_model(const GestureModel& model, const std::string& path);

}  // namespace shellforge
