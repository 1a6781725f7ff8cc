#include "models/model.hpp"

#include "tensor/init.hpp"

namespace evoke::nn {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Relu: return "relu";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Linear: return "linear";
  }
  return "?";
}

Layer Layer::conv(std::string name, std::size_t cin, std::size_t cout, std::size_t kernel,
                  Prng& prng) {
  Layer l;
  l.kind = LayerKind::Conv2d;
  l.name = std::move(name);
  l.weight = Variable<float>::leaf(kaiming_init<float>(prng, {cout, cin, kernel, kernel}), true);
  l.bias = Variable<float>::leaf(Tensor<float>({cout}), true);
  l.padding = same_padding(kernel);
  return l;
}

Layer Layer::linear(std::string name, std::size_t in, std::size_t out, Prng& prng) {
  Layer l;
  l.kind = LayerKind::Linear;
  l.name = std::move(name);
  l.weight = Variable<float>::leaf(kaiming_init<float>(prng, {out, in}), true);
  l.bias = Variable<float>::leaf(Tensor<float>({out}), true);
  return l;
}

Layer Layer::relu(std::string name) {
  Layer l;
  l.kind = LayerKind::Relu;
  l.name = std::move(name);
  return l;
}

Layer Layer::flatten(std::string name) {
  Layer l;
  l.kind = LayerKind::Flatten;
  l.name = std::move(name);
  return l;
}

Json to_json(const TeacherConfig& c) {
  return {{"conv_channels", c.conv_channels}, {"fuse_channels", c.fuse_channels},
          {"kernel", c.kernel},               {"fc_hidden", c.fc_hidden},
          {"n_labels", c.n_labels},           {"in_bands", c.in_bands},
          {"grid", c.grid}};
}

Json to_json(const StudentConfig& c) {
  return {{"c1_channels", c.c1_channels}, {"c2_channels", c.c2_channels},
          {"kernel", c.kernel},           {"fc_hidden", c.fc_hidden},
          {"n_labels", c.n_labels},       {"in_bands", c.in_bands},
          {"grid", c.grid}};
}

// Missing keys keep their defaults.
TeacherConfig teacher_config_from_json(const Json& j) {
  TeacherConfig c;
  try {
    c.conv_channels = j.value("conv_channels", c.conv_channels);
    c.fuse_channels = j.value("fuse_channels", c.fuse_channels);
    c.kernel = j.value("kernel", c.kernel);
    c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
    c.n_labels = j.value("n_labels", c.n_labels);
    c.in_bands = j.value("in_bands", c.in_bands);
    c.grid = j.value("grid", c.grid);
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("teacher config: ") + e.what());
  }
  return c;
}

StudentConfig student_config_from_json(const Json& j) {
  StudentConfig c;
  try {
    c.c1_channels = j.value("c1_channels", c.c1_channels);
    c.c2_channels = j.value("c2_channels", c.c2_channels);
    c.kernel = j.value("kernel", c.kernel);
    c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
    c.n_labels = j.value("n_labels", c.n_labels);
    c.in_bands = j.value("in_bands", c.in_bands);
    c.grid = j.value("grid", c.grid);
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("student config: ") + e.what());
  }
  return c;
}

Model::Model(std::string architecture, Json config, std::vector<Layer> layers)
    : architecture_(std::move(architecture)), config_(std::move(config)), layers_(std::move(layers)) {}

Model::Model(const Model& other)
    : architecture_(other.architecture_), config_(other.config_), layers_(other.layers_) {
  for (Layer& l : layers_) {
    if (l.weight.defined()) l.weight = Variable<float>::leaf(l.weight.value(), l.weight.requires_grad());
    if (l.bias.defined()) l.bias = Variable<float>::leaf(l.bias.value(), l.bias.requires_grad());
  }
}

Model& Model::operator=(const Model& other) {
  if (this != &other) *this = Model(other);
  return *this;
}

Variable<float> Model::forward(const Variable<float>& input) const {
  Variable<float> x = input;
  for (const Layer& l : layers_) {
    switch (l.kind) {
      case LayerKind::Conv2d: x = conv2d(x, l.weight, l.bias, l.padding); break;
      case LayerKind::Relu: x = relu(x); break;
      case LayerKind::Flatten: x = flatten(x); break;
      case LayerKind::Linear: x = linear(x, l.weight, l.bias); break;
    }
  }
  return x;
}

Tensor<float> Model::predict_logits(const Tensor<float>& input) const {
  NoGradGuard guard;
  return forward(Variable<float>::leaf(input)).value();
}

std::vector<NamedParameter<float>> Model::parameters() const {
  std::vector<NamedParameter<float>> out;
  for (const Layer& l : layers_) {
    if (l.weight.defined()) out.push_back({l.name + ".weight", l.weight});
    if (l.bias.defined()) out.push_back({l.name + ".bias", l.bias});
  }
  return out;
}

std::vector<Shape> Model::shape_ladder(const Shape& input) const {
  std::vector<Shape> out;
  Shape s = input;
  for (const Layer& l : layers_) {
    switch (l.kind) {
      case LayerKind::Conv2d: {
        const Shape& w = l.weight.dims();
        require(s.size() == 4 && s[1] == w[1], ErrorCode::Shape,
                l.name + ": input " + shape_string(s) + " incompatible with weight " +
                    shape_string(w));
        s = {s[0], w[0], s[2] + l.padding.top + l.padding.bottom - w[2] + 1,
             s[3] + l.padding.left + l.padding.right - w[3] + 1};
        break;
      }
      case LayerKind::Relu: break;
      case LayerKind::Flatten: s = {s[0], shape_size(s) / s[0]}; break;
      case LayerKind::Linear: {
        const Shape& w = l.weight.dims();
        require(s.size() == 2 && s[1] == w[1], ErrorCode::Shape,
                l.name + ": input " + shape_string(s) + " incompatible with weight " +
                    shape_string(w));
        s = {s[0], w[0]};
        break;
      }
    }
    out.push_back(s);
  }
  return out;
}

Model build_teacher(const TeacherConfig& c, Prng& prng) {
  const auto [c1, c2, c3] = c.conv_channels;
  std::vector<Layer> layers;
  layers.push_back(Layer::conv("conv1", c.in_bands, c1, c.kernel, prng));
  layers.push_back(Layer::relu("relu1"));
  layers.push_back(Layer::conv("conv2", c1, c2, c.kernel, prng));
  layers.push_back(Layer::relu("relu2"));
  layers.push_back(Layer::conv("conv3", c2, c3, c.kernel, prng));
  layers.push_back(Layer::relu("relu3"));
  layers.push_back(Layer::conv("fuse", c3, c.fuse_channels, 1, prng));
  layers.push_back(Layer::relu("relu4"));
  layers.push_back(Layer::flatten("flatten"));
  layers.push_back(Layer::linear("fc1", c.flatten_size(), c.fc_hidden, prng));
  layers.push_back(Layer::relu("relu5"));
  layers.push_back(Layer::linear("fc2", c.fc_hidden, c.n_labels, prng));
  return Model(kTeacherTag, to_json(c), std::move(layers));
}

Model build_student(const StudentConfig& c, Prng& prng) {
  std::vector<Layer> layers;
  layers.push_back(Layer::conv("c1", c.in_bands, c.c1_channels, c.kernel, prng));
  layers.push_back(Layer::relu("relu1"));
  layers.push_back(Layer::conv("c2", c.c1_channels, c.c2_channels, c.kernel, prng));
  layers.push_back(Layer::relu("relu2"));
  layers.push_back(Layer::flatten("flatten"));
  layers.push_back(Layer::linear("fc1", c.flatten_size(), c.fc_hidden, prng));
  layers.push_back(Layer::relu("relu3"));
  layers.push_back(Layer::linear("fc2", c.fc_hidden, c.n_labels, prng));
  return Model(kStudentTag, to_json(c), std::move(layers));
}

Model build_model(const std::string& architecture, const Json& config, Prng& prng) {
  if (architecture == kTeacherTag) return build_teacher(teacher_config_from_json(config), prng);
  if (architecture == kStudentTag) return build_student(student_config_from_json(config), prng);
  fail(ErrorCode::Architecture, "unknown architecture tag '" + architecture + "'");
}

std::size_t count_params(const Model& model) {
  std::size_t n = 0;
  for (const auto& p : model.parameters()) n += p.var.value().size();
  return n;
}

std::size_t count_flops(const Model& model, const Shape& input) {
  const std::vector<Shape> ladder = model.shape_ladder(input);
  std::size_t flops = 0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const Layer& l = model.layers()[i];
    const Shape& out = ladder[i];
    switch (l.kind) {
      case LayerKind::Conv2d: {
        const Shape& w = l.weight.dims();
        flops += 2 * out[0] * out[2] * out[3] * w[0] * w[1] * w[2] * w[3];
        break;
      }
      case LayerKind::Linear:
        flops += 2 * out[0] * l.weight.dims()[0] * l.weight.dims()[1];
        break;
      case LayerKind::Relu: flops += shape_size(out); break;
      case LayerKind::Flatten: break;
    }
  }
  return flops;
}

}  // namespace evoke::nn
