#include "shellforge/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shellforge/assembly.hpp"
#include "shellforge/blank.hpp"
#include "shellforge/circuit.hpp"
#include "shellforge/field.hpp"
#include "shellforge/gesture.hpp"
#include "shellforge/mesh_io.hpp"
#include "shellforge/registration.hpp"
#include "shellforge/split.hpp"

namespace shellforge {

using nlohmann::json;

namespace {

json argv_echo(int argc, const char* const* argv) {
    json a = json::array();
    for (int i = 0; i < argc; ++i) a.push_back(argv[i]);
    return a;
}

void write_report(const std::string& out_dir, const std::string& name, json report) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name + "_report.json";
    std::string text = report.dump(2);
    text.push_back('\n');
    write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

json diagnostics_json(const MeshDiagnostics& d) {
    return {{"watertight", d.watertight},
            {"manifold", d.manifold},
            {"boundary_edges", d.boundary_edge_count},
            {"inverted_adjacent_pairs", d.inverted_adjacent_pairs},
            {"degenerate_triangles", d.degenerate_triangle_count},
            {"connected_components", d.connected_components}};
}

Plane parse_plane_flag(const std::string& text) {
    Plane plane;
    double nx, ny, nz, off;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf", &nx, &ny, &nz, &off) != 4)
        throw CLI::ValidationError("--plane", "expected nx,ny,nz,offset");
    plane.normal = normalized({nx, ny, nz});
    plane.offset = off;
    return plane;
}

struct CommonOut {
    std::string out_dir = "out";
    std::string name;
    double pitch = 0.2;
};

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"scan-to-parts toolchain for interactive physical prototypes"};
    app.require_subcommand(1);
    json echo = {{"argv", argv_echo(argc, argv)}};

    // --- blank -------------------------------------------------------------
    auto* cmd_blank = app.add_subcommand("blank", "printable circuit stand-in for sculpting");
    std::string blank_spec_path;
    CommonOut blank_out;
    blank_out.name = "blank";
    cmd_blank->add_option("--spec", blank_spec_path, "blank/circuit JSON")->required();
    cmd_blank->add_option("-o,--out", blank_out.out_dir, "output directory");
    cmd_blank->add_option("--name", blank_out.name, "output base name");
    cmd_blank->add_option("--pitch", blank_out.pitch, "voxel pitch, mm");

    // --- bracket -----------------------------------------------------------
    auto* cmd_bracket = app.add_subcommand("bracket", "snap-in mounting bracket");
    std::string bracket_spec_path;
    double bracket_clearance = 0.15;
    CommonOut bracket_out;
    bracket_out.name = "bracket";
    cmd_bracket->add_option("--spec", bracket_spec_path, "circuit JSON")->required();
    cmd_bracket->add_option("--clearance", bracket_clearance, "fit clearance, mm");
    cmd_bracket->add_option("-o,--out", bracket_out.out_dir, "output directory");
    cmd_bracket->add_option("--name", bracket_out.name, "output base name");
    cmd_bracket->add_option("--pitch", bracket_out.pitch, "voxel pitch, mm");

    // --- validate ----------------------------------------------------------
    auto* cmd_validate = app.add_subcommand("validate", "mesh diagnostics (optionally repair)");
    std::string validate_mesh_path;
    bool do_repair = false;
    std::string validate_out_dir;
    std::string validate_name = "validate";
    cmd_validate->add_option("--mesh", validate_mesh_path, "mesh file (STL/OBJ)")->required();
    cmd_validate->add_flag("--repair", do_repair, "weld, drop degenerates, unify orientation");
    cmd_validate->add_option("-o,--out", validate_out_dir,
                             "write the repaired mesh and report here");
    cmd_validate->add_option("--name", validate_name, "output base name");

    // --- shell ---------------------------------------------------------------
    auto* cmd_shell = app.add_subcommand("shell", "hollow a watertight scan");
    std::string shell_mesh_path;
    double shell_thickness = 3.0;
    CommonOut shell_out;
    shell_out.name = "shell";
    cmd_shell->add_option("--mesh", shell_mesh_path, "mesh file")->required();
    cmd_shell->add_option("--thickness", shell_thickness, "wall thickness, mm");
    cmd_shell->add_option("-o,--out", shell_out.out_dir, "output directory");
    cmd_shell->add_option("--name", shell_out.name, "output base name");
    cmd_shell->add_option("--pitch", shell_out.pitch, "voxel pitch, mm");

    // --- split ---------------------------------------------------------------
    auto* cmd_split = app.add_subcommand("split", "exact plane split into two parts");
    std::string split_mesh_path, split_plane_text;
    CommonOut split_out;
    split_out.name = "split";
    cmd_split->add_option("--mesh", split_mesh_path, "mesh file")->required();
    cmd_split->add_option("--plane", split_plane_text, "nx,ny,nz,offset")->required();
    cmd_split->add_option("-o,--out", split_out.out_dir, "output directory");
    cmd_split->add_option("--name", split_out.name, "output base name");

    // --- place ---------------------------------------------------------------
    auto* cmd_place = app.add_subcommand("place", "fuse a bracket into a shell piece");
    std::string place_mesh_path, place_bracket_path, place_pose_path;
    CommonOut place_out;
    place_out.name = "placed";
    cmd_place->add_option("--mesh", place_mesh_path, "shell piece")->required();
    cmd_place->add_option("--bracket", place_bracket_path, "bracket mesh")->required();
    cmd_place->add_option("--pose", place_pose_path,
                          "JSON {rotation: 3x3 rows, translation: [x,y,z]}")
        ->required();
    cmd_place->add_option("-o,--out", place_out.out_dir, "output directory");
    cmd_place->add_option("--name", place_out.name, "output base name");
    cmd_place->add_option("--pitch", place_out.pitch, "voxel pitch, mm");

    // --- fasten ---------------------------------------------------------------
    auto* cmd_fasten = app.add_subcommand("fasten", "friction-fit bosses and cavities");
    std::string fasten_a_path, fasten_b_path, fasten_plan_path;
    CommonOut fasten_out;
    fasten_out.name = "fastened";
    cmd_fasten->add_option("--part-a", fasten_a_path, "boss piece")->required();
    cmd_fasten->add_option("--part-b", fasten_b_path, "cavity piece")->required();
    cmd_fasten->add_option("--plan", fasten_plan_path, "assembly plan JSON")->required();
    cmd_fasten->add_option("-o,--out", fasten_out.out_dir, "output directory");
    cmd_fasten->add_option("--name", fasten_out.name, "output base name");

    // --- pipeline ---------------------------------------------------------------
    auto* cmd_pipeline = app.add_subcommand("pipeline", "scan to printable parts, end to end");
    PipelineInputs pin;
    std::string pipeline_spec_path, pipeline_fiducials_path, pipeline_overrides_path;
    std::vector<double> hint;
    pin.name = "part";
    pin.out_dir = "out";
    cmd_pipeline->add_option("--scan", pin.scan_path, "scan mesh (STL/OBJ)")->required();
    cmd_pipeline->add_option("--spec", pipeline_spec_path, "blank/circuit JSON")->required();
    cmd_pipeline->add_option("--fiducials", pipeline_fiducials_path,
                             "3-line 'x y z' file of picked bump centers");
    cmd_pipeline->add_option("--hint", hint, "x y z window area hint for bump detection")
        ->expected(3);
    cmd_pipeline->add_option("--hint-radius", pin.detect_hint_radius, "detection radius, mm");
    cmd_pipeline->add_option("--overrides", pipeline_overrides_path, "plan override JSON");
    cmd_pipeline->add_option("-o,--out", pin.out_dir, "output directory");
    cmd_pipeline->add_option("--name", pin.name, "output base name");
    cmd_pipeline->add_option("--pitch", pin.pitch, "voxel pitch, mm");

    // --- gesture ---------------------------------------------------------------
    auto* cmd_gesture = app.add_subcommand("gesture", "stroke classifier tooling");
    cmd_gesture->require_subcommand(1);

    auto* g_train = cmd_gesture->add_subcommand("train", "train an MLP on labeled strokes");
    std::string train_data_path, train_model_path = "model.json";
    TrainConfig tconf;
    bool seed_given = false;
    g_train->add_option("--data", train_data_path, "labeled stroke JSONL")->required();
    g_train->add_option("--out", train_model_path, "model file");
    g_train->add_option("--seed", tconf.seed, "RNG seed (required: runs are reproducible)")
        ->required();
    g_train->add_option("--epochs", tconf.epochs, "gradient descent epochs");
    g_train->add_option("--lr", tconf.learning_rate, "learning rate");
    g_train->add_option("--hidden", tconf.hidden, "hidden width (20 by design)");
    g_train->add_option("--device-id", tconf.device_id, "device this classifier belongs to");
    (void)seed_given;

    auto* g_eval = cmd_gesture->add_subcommand("eval", "cross-validated synthetic benchmark");
    std::string eval_corpus = "synth";
    std::uint64_t eval_seed = 7;
    int eval_n = 20, eval_splits = 5;
    double eval_sigma = 0.15;
    std::string eval_out_dir;
    g_eval->add_option("--corpus", eval_corpus, "only 'synth' is available");
    g_eval->add_option("--seed", eval_seed, "RNG seed");
    g_eval->add_option("--n", eval_n, "samples per class");
    g_eval->add_option("--sigma", eval_sigma, "noise level");
    g_eval->add_option("--splits", eval_splits, "random 80/20 splits");
    g_eval->add_option("-o,--out", eval_out_dir, "write accuracy JSON here");

    auto* g_classify = cmd_gesture->add_subcommand("classify", "label strokes with a model");
    std::string classify_model_path, classify_data_path;
    bool classify_segment = false;
    int classify_idle_ms = 250;
    g_classify->add_option("--model", classify_model_path, "model JSON")->required();
    g_classify->add_option("--data", classify_data_path, "stroke JSONL")->required();
    g_classify->add_flag("--segment", classify_segment,
                         "treat the input as one raw stream and segment it first");
    g_classify->add_option("--idle-ms", classify_idle_ms, "segmentation idle threshold");

    auto* g_synth = cmd_gesture->add_subcommand("synth", "generate a synthetic corpus");
    std::string synth_out_path = "corpus.jsonl";
    std::uint64_t synth_seed = 7;
    int synth_n = 20;
    double synth_sigma = 0.15;
    std::string synth_device = "default";
    g_synth->add_option("--out", synth_out_path, "corpus file");
    g_synth->add_option("--seed", synth_seed, "RNG seed")->required();
    g_synth->add_option("--n", synth_n, "samples per class");
    g_synth->add_option("--sigma", synth_sigma, "noise level");
    g_synth->add_option("--device-id", synth_device, "device tag");

    auto* g_check = cmd_gesture->add_subcommand("check", "sensor-geometry design check");
    WindowDesign design;
    bool no_cover = false;
    g_check->add_option("--hole", design.hole_diameter, "hole diameter, mm")->required();
    g_check->add_option("--cover", design.cover_thickness, "cover thickness, mm");
    g_check->add_flag("--no-cover", no_cover, "open hole, no cover sheet");
    g_check->add_option("--standoff", design.standoff, "lens to cover underside, mm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*cmd_blank) {
            BlankSpec spec = load_blank_spec(blank_spec_path);
            TriangleMesh mesh = generate_blank(spec, blank_out.pitch);
            std::filesystem::create_directories(blank_out.out_dir);
            std::string path = blank_out.out_dir + "/" + blank_out.name + ".stl";
            save_mesh(mesh, path);
            json report = echo;
            report["spec"] = json::parse(blank_to_json_text(spec));
            report["diagnostics"] = diagnostics_json(validate(mesh));
            report["volume"] = metrics(mesh).signed_volume;
            report["outputs"] = {path};
            write_report(blank_out.out_dir, blank_out.name, report);
            std::cout << path << "\n";
            return 0;
        }
        if (*cmd_bracket) {
            CircuitSpec spec = load_circuit_spec(bracket_spec_path);
            TriangleMesh mesh = generate_bracket(spec, bracket_clearance, bracket_out.pitch);
            std::filesystem::create_directories(bracket_out.out_dir);
            std::string path = bracket_out.out_dir + "/" + bracket_out.name + ".stl";
            save_mesh(mesh, path);
            BracketDims dims = bracket_dims(spec, bracket_clearance);
            json report = echo;
            report["channel_width"] = dims.channel_width;
            report["channel_length"] = dims.channel_length;
            report["diagnostics"] = diagnostics_json(validate(mesh));
            report["outputs"] = {path};
            write_report(bracket_out.out_dir, bracket_out.name, report);
            std::cout << path << "\n";
            return 0;
        }
        if (*cmd_validate) {
            TriangleMesh mesh = load_mesh(validate_mesh_path);
            json report = echo;
            report["input"] = diagnostics_json(validate(mesh));
            if (do_repair) {
                TriangleMesh repaired = repair_basic(mesh);
                report["repaired"] = diagnostics_json(validate(repaired));
                if (!validate_out_dir.empty()) {
                    std::filesystem::create_directories(validate_out_dir);
                    std::string path = validate_out_dir + "/" + validate_name + ".stl";
                    save_mesh(repaired, path);
                    report["outputs"] = {path};
                }
            }
            if (!validate_out_dir.empty()) write_report(validate_out_dir, validate_name, report);
            std::cout << report.dump(2) << "\n";
            return 0;
        }
        if (*cmd_shell) {
            TriangleMesh mesh = repair_basic(load_mesh(shell_mesh_path));
            std::vector<Warning> warnings;
            TriangleMesh hollow = shell(mesh, shell_thickness, shell_out.pitch, &warnings);
            std::filesystem::create_directories(shell_out.out_dir);
            std::string path = shell_out.out_dir + "/" + shell_out.name + ".stl";
            save_mesh(hollow, path);
            json report = echo;
            report["thickness"] = shell_thickness;
            report["pitch"] = shell_out.pitch;
            report["volume"] = metrics(hollow).signed_volume;
            report["warnings"] = json::array();
            for (const Warning& w : warnings)
                report["warnings"].push_back({{"code", w.code}, {"message", w.message}});
            report["outputs"] = {path};
            write_report(shell_out.out_dir, shell_out.name, report);
            std::cout << path << "\n";
            return 0;
        }
        if (*cmd_split) {
            TriangleMesh mesh = load_mesh(split_mesh_path);
            Plane plane = parse_plane_flag(split_plane_text);
            auto [below, above] = split_by_plane(mesh, plane);
            std::filesystem::create_directories(split_out.out_dir);
            std::string path_a = split_out.out_dir + "/" + split_out.name + "_below.stl";
            std::string path_b = split_out.out_dir + "/" + split_out.name + "_above.stl";
            save_mesh(below, path_a);
            save_mesh(above, path_b);
            json report = echo;
            report["volume_below"] = metrics(below).signed_volume;
            report["volume_above"] = metrics(above).signed_volume;
            report["outputs"] = {path_a, path_b};
            write_report(split_out.out_dir, split_out.name, report);
            std::cout << path_a << "\n" << path_b << "\n";
            return 0;
        }
        if (*cmd_place) {
            TriangleMesh piece = load_mesh(place_mesh_path);
            TriangleMesh bracket = load_mesh(place_bracket_path);
            json pose_json = json::parse(std::string(
                reinterpret_cast<const char*>(read_file_bytes(place_pose_path).data()),
                read_file_bytes(place_pose_path).size()));
            RigidTransform pose;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    pose.rotation(i, j) = pose_json.at("rotation")[i][j].get<double>();
            pose.translation = {pose_json.at("translation")[0].get<double>(),
                                pose_json.at("translation")[1].get<double>(),
                                pose_json.at("translation")[2].get<double>()};
            TriangleMesh fused = place_bracket(piece, bracket, pose, place_out.pitch);
            std::filesystem::create_directories(place_out.out_dir);
            std::string path = place_out.out_dir + "/" + place_out.name + ".stl";
            save_mesh(fused, path);
            json report = echo;
            report["volume"] = metrics(fused).signed_volume;
            report["outputs"] = {path};
            write_report(place_out.out_dir, place_out.name, report);
            std::cout << path << "\n";
            return 0;
        }
        if (*cmd_fasten) {
            TriangleMesh a = load_mesh(fasten_a_path);
            TriangleMesh b = load_mesh(fasten_b_path);
            auto bytes = read_file_bytes(fasten_plan_path);
            AssemblyPlan plan = plan_apply_overrides(
                AssemblyPlan{}, std::string(bytes.begin(), bytes.end()));
            PartSet set = add_fasteners(a, b, plan);
            std::filesystem::create_directories(fasten_out.out_dir);
            std::string path_a = fasten_out.out_dir + "/" + fasten_out.name + "_a.stl";
            std::string path_b = fasten_out.out_dir + "/" + fasten_out.name + "_b.stl";
            save_mesh(set.part_a, path_a);
            save_mesh(set.part_b, path_b);
            json report = echo;
            report["report"] = {{"volume_a", set.report.volume_a},
                                {"volume_b", set.report.volume_b},
                                {"watertight_a", set.report.watertight_a},
                                {"watertight_b", set.report.watertight_b},
                                {"interference_volume", set.report.interference_volume}};
            report["outputs"] = {path_a, path_b};
            write_report(fasten_out.out_dir, fasten_out.name, report);
            std::cout << path_a << "\n" << path_b << "\n";
            return 0;
        }
        if (*cmd_pipeline) {
            pin.blank = load_blank_spec(pipeline_spec_path);
            if (!pipeline_fiducials_path.empty())
                pin.manual_fiducials = load_fiducials(pipeline_fiducials_path);
            if (!hint.empty()) pin.detect_hint = Vec3{hint[0], hint[1], hint[2]};
            if (!pipeline_overrides_path.empty()) {
                auto bytes = read_file_bytes(pipeline_overrides_path);
                pin.plan_overrides_json = std::string(bytes.begin(), bytes.end());
            }
            PipelineResult result = run_pipeline(pin);
            for (const std::string& f : result.output_files) std::cout << f << "\n";
            return 0;
        }
        if (*g_train) {
            std::vector<Stroke> data = load_strokes(train_data_path);
            GestureModel model = train(data, tconf);
            save_model(model, train_model_path);
            std::cout << train_model_path << " training-accuracy "
                      << model.final_training_accuracy << "\n";
            return 0;
        }
        if (*g_eval) {
            if (eval_corpus != "synth")
                throw Error(ErrorCode::UsageError, "only --corpus synth is available");
            EvalResult r = evaluate_synthetic(eval_seed, eval_n, eval_sigma, eval_splits);
            json report = echo;
            report["corpus"] = {{"classes", default_gesture_classes()},
                                {"samples", r.total_samples},
                                {"noise_sigma", eval_sigma},
                                {"seed", eval_seed}};
            report["split_accuracy"] = r.split_accuracy;
            report["mean_accuracy"] = r.mean_accuracy;
            std::cout << "samples " << r.total_samples << "\n";
            for (std::size_t s = 0; s < r.split_accuracy.size(); ++s)
                std::cout << "split " << s << " accuracy " << r.split_accuracy[s] << "\n";
            std::cout << "mean accuracy " << r.mean_accuracy << "\n";
            if (!eval_out_dir.empty()) write_report(eval_out_dir, "gesture_eval", report);
            return 0;
        }
        if (*g_classify) {
            GestureModel model = load_model(classify_model_path);
            std::vector<Stroke> strokes = load_strokes(classify_data_path);
            if (classify_segment) {
                std::vector<FlowSample> stream;
                for (const Stroke& s : strokes)
                    stream.insert(stream.end(), s.samples.begin(), s.samples.end());
                strokes = segment(stream, classify_idle_ms);
            }
            for (std::size_t i = 0; i < strokes.size(); ++i) {
                Classification c = classify(model, strokes[i]);
                std::cout << i << " " << c.label << " " << c.confidence << "\n";
            }
            return 0;
        }
        if (*g_synth) {
            std::vector<Stroke> corpus =
                synth_corpus(synth_n, synth_sigma, synth_seed, synth_device);
            save_strokes(corpus, synth_out_path);
            std::cout << synth_out_path << " strokes " << corpus.size() << "\n";
            return 0;
        }
        if (*g_check) {
            design.cover_present = !no_cover;
            auto violations = check_geometry(design);
            json report = echo;
            report["violations"] = json::array();
            for (const auto& v : violations)
                report["violations"].push_back({{"code", v.code}, {"message", v.message}});
            std::cout << report["violations"].dump(2) << "\n";
            return violations.empty() ? 0 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace shellforge
