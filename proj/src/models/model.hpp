#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "tensor/adam.hpp"
#include "tensor/ops.hpp"
#include "tensor/prng.hpp"

namespace evoke::nn {

enum class LayerKind { Conv2d, Relu, Flatten, Linear };

const char* layer_kind_name(LayerKind kind);

struct Layer {
  LayerKind kind = LayerKind::Relu;
  std::string name;
  Variable<float> weight;  // conv: [cout,cin,k,k]; linear: [out,in]
  Variable<float> bias;
  Padding padding;

  static Layer conv(std::string name, std::size_t cin, std::size_t cout, std::size_t kernel,
                    Prng& prng);
  static Layer linear(std::string name, std::size_t in, std::size_t out, Prng& prng);
  static Layer relu(std::string name);
  static Layer flatten(std::string name);
};

struct TeacherConfig {
  std::array<std::size_t, 3> conv_channels{64, 128, 256};
  std::size_t fuse_channels = 64;
  std::size_t kernel = 4;
  std::size_t fc_hidden = 1024;
  std::size_t n_labels = 3;
  std::size_t in_bands = 4;
  std::size_t grid = 9;

  std::size_t flatten_size() const { return fuse_channels * grid * grid; }
};

struct StudentConfig {
  std::size_t c1_channels = 16;
  std::size_t c2_channels = 32;
  std::size_t kernel = 4;
  std::size_t fc_hidden = 128;
  std::size_t n_labels = 3;
  std::size_t in_bands = 4;
  std::size_t grid = 9;

  std::size_t flatten_size() const { return c2_channels * grid * grid; }
};

Json to_json(const TeacherConfig& cfg);
Json to_json(const StudentConfig& cfg);
TeacherConfig teacher_config_from_json(const Json& j);
StudentConfig student_config_from_json(const Json& j);

inline constexpr const char* kTeacherTag = "teacher";
inline constexpr const char* kStudentTag = "student";

/// Sequential network. Copies are deep: each copy owns its parameters.
class Model {
 public:
  Model() = default;
  Model(std::string architecture, Json config, std::vector<Layer> layers);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const std::string& architecture() const { return architecture_; }
  const Json& config() const { return config_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }

  /// Records a graph when gradients are enabled; outputs raw logits.
  Variable<float> forward(const Variable<float>& input) const;
  /// Inference without graph recording.
  Tensor<float> predict_logits(const Tensor<float>& input) const;

  /// Weights then bias per parameterised layer, named "<layer>.weight" etc.
  std::vector<NamedParameter<float>> parameters() const;

  /// Output dims after every layer for a given input.
  std::vector<Shape> shape_ladder(const Shape& input) const;

 private:
  std::string architecture_;
  Json config_;
  std::vector<Layer> layers_;
};

/// conv(4->64) relu conv(64->128) relu conv(128->256) relu conv1x1(256->64)
/// relu flatten linear(5184->1024) relu linear(1024->3)
Model build_teacher(const TeacherConfig& cfg, Prng& prng);
/// conv(4->16) relu conv(16->32) relu flatten linear(2592->128) relu linear(128->3)
Model build_student(const StudentConfig& cfg, Prng& prng);
/// Dispatches on the architecture tag; throws ErrorCode::Architecture.
Model build_model(const std::string& architecture, const Json& config, Prng& prng);

std::size_t count_params(const Model& model);
/// MAC = 2 FLOPs. conv: 2*h*w*cout*cin*k^2, linear: 2*out*in, activation: 1
/// per element, all times the batch extent of `input`.
std::size_t count_flops(const Model& model, const Shape& input);

}  // namespace evoke::nn
