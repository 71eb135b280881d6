#include <fstream>
#include <sstream>
#include <string>

#include "imbgan/classifiers.hpp"
#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

// Text layout:
//   imbgan-model 1
//   kind <svm|dt|logreg|mlp>
//   features <d>
//   ...kind-specific lines...
// Vectors are written as "<name> <count> v0 v1 ..." with round-trip decimals.

namespace imbgan::classifiers {

namespace {

constexpr const char* kMagic = "imbgan-model";
constexpr int kVersion = 1;

void put_vector(std::ostringstream& out, const char* name,
                std::span<const double> values) {
  out << name << ' ' << values.size();
  for (double v : values) out << ' ' << csv::format_double(v);
  out << '\n';
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : in_(std::string(text)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw SchemaError("model file truncated");
    return w;
  }

  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) {
      throw SchemaError("model file: expected \"" + w + "\", got \"" + got +
                        "\"");
    }
  }

  std::size_t count() {
    const std::string w = word();
    std::size_t pos = 0;
    std::size_t value = 0;
    try {
      value = std::stoull(w, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != w.size() || w.empty()) {
      throw SchemaError("model file: \"" + w + "\" is not a count");
    }
    return value;
  }

  double number() {
    const std::string w = word();
    const auto v = csv::parse_double(w);
    if (!v) throw SchemaError("model file: \"" + w + "\" is not a number");
    return *v;
  }

  std::vector<double> vector(const char* name) {
    expect(name);
    std::vector<double> values(count());
    for (double& v : values) v = number();
    return values;
  }

 private:
  std::istringstream in_;
};

nn::LayerKind parse_layer_kind(const std::string& name) {
  for (nn::LayerKind k :
       {nn::LayerKind::kDense, nn::LayerKind::kRelu, nn::LayerKind::kSigmoid,
        nn::LayerKind::kSoftmax, nn::LayerKind::kBatchNorm,
        nn::LayerKind::kDropout}) {
    if (name == nn::to_string(k)) return k;
  }
  throw SchemaError("model file: unknown layer kind \"" + name + "\"");
}

}  // namespace

std::string serialize(const Model& model) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(kind_of(model)) << '\n';
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          out << "features " << m.weights.size() << '\n';
          put_vector(out, "weights", m.weights);
          out << "bias " << csv::format_double(m.bias) << '\n';
        } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
          out << "features " << m.weights.size() << '\n';
          put_vector(out, "weights", m.weights);
          out << "bias " << csv::format_double(m.bias) << '\n';
          out << "lambda " << csv::format_double(m.regularization) << '\n';
        } else if constexpr (std::is_same_v<T, DecisionTreeModel>) {
          out << "features " << m.feature_count << '\n';
          out << "nodes " << m.nodes.size() << '\n';
          for (const TreeNode& n : m.nodes) {
            if (n.is_leaf()) {
              out << "leaf " << csv::format_double(n.positive_fraction) << ' '
                  << n.samples << '\n';
            } else {
              out << "split " << *n.feature << ' '
                  << csv::format_double(n.threshold) << ' ' << n.left << ' '
                  << n.right << ' ' << csv::format_double(n.positive_fraction)
                  << ' ' << n.samples << '\n';
            }
          }
        } else {
          out << "features " << nn::input_dim(m.spec) << '\n';
          out << "layers " << m.spec.size() << '\n';
          for (std::size_t i = 0; i < m.spec.size(); ++i) {
            const nn::LayerSpec& l = m.spec[i];
            const nn::LayerParams& p = m.state.layers[i];
            out << "layer " << nn::to_string(l.kind) << ' ' << l.input_dim
                << ' ' << l.output_dim << ' ' << csv::format_double(l.rate)
                << '\n';
            if (l.kind == nn::LayerKind::kDense) {
              put_vector(out, "weights", p.weights.values());
              put_vector(out, "bias", p.bias);
            } else if (l.kind == nn::LayerKind::kBatchNorm) {
              put_vector(out, "gamma", p.gamma);
              put_vector(out, "beta", p.beta);
              put_vector(out, "running_mean", p.running_mean);
              put_vector(out, "running_var", p.running_var);
            }
          }
        }
      },
      model);
  return out.str();
}

Model deserialize(std::string_view text) {
  Tokens in(text);
  in.expect(kMagic);
  if (in.count() != static_cast<std::size_t>(kVersion)) {
    throw SchemaError("model file: unsupported version");
  }
  in.expect("kind");
  const std::string kind_name = in.word();
  const auto kind = parse_model_kind(kind_name);
  if (!kind) throw SchemaError("model file: unknown kind \"" + kind_name + "\"");
  in.expect("features");
  const std::size_t features = in.count();

  switch (*kind) {
    case ModelKind::kLogReg: {
      LogisticModel m;
      m.weights = in.vector("weights");
      in.expect("bias");
      m.bias = in.number();
      if (m.weights.size() != features) throw SchemaError("weight count");
      return m;
    }
    case ModelKind::kSvm: {
      LinearSvmModel m;
      m.weights = in.vector("weights");
      in.expect("bias");
      m.bias = in.number();
      in.expect("lambda");
      m.regularization = in.number();
      if (m.weights.size() != features) throw SchemaError("weight count");
      return m;
    }
    case ModelKind::kDecisionTree: {
      DecisionTreeModel m;
      m.feature_count = features;
      in.expect("nodes");
      m.nodes.resize(in.count());
      for (TreeNode& n : m.nodes) {
        const std::string tag = in.word();
        if (tag == "leaf") {
          n.positive_fraction = in.number();
          n.samples = in.count();
        } else if (tag == "split") {
          n.feature = in.count();
          n.threshold = in.number();
          n.left = in.count();
          n.right = in.count();
          n.positive_fraction = in.number();
          n.samples = in.count();
          if (n.left >= m.nodes.size() || n.right >= m.nodes.size() ||
              *n.feature >= features) {
            throw SchemaError("model file: node reference out of range");
          }
        } else {
          throw SchemaError("model file: bad node tag \"" + tag + "\"");
        }
      }
      return m;
    }
    case ModelKind::kMlp: {
      MlpModel m;
      in.expect("layers");
      const std::size_t layers = in.count();
      m.state.layers.resize(layers);
      for (std::size_t i = 0; i < layers; ++i) {
        in.expect("layer");
        nn::LayerSpec l;
        l.kind = parse_layer_kind(in.word());
        l.input_dim = in.count();
        l.output_dim = in.count();
        l.rate = in.number();
        m.spec.push_back(l);
        nn::LayerParams& p = m.state.layers[i];
        if (l.kind == nn::LayerKind::kDense) {
          p.weights = Matrix(l.input_dim, l.output_dim, in.vector("weights"));
          p.bias = in.vector("bias");
        } else if (l.kind == nn::LayerKind::kBatchNorm) {
          p.gamma = in.vector("gamma");
          p.beta = in.vector("beta");
          p.running_mean = in.vector("running_mean");
          p.running_var = in.vector("running_var");
        }
      }
      nn::check_state(m.spec, m.state);
      if (nn::input_dim(m.spec) != features) throw SchemaError("feature count");
      return m;
    }
  }
  throw SchemaError("model file: unknown kind");
}

void save_model(const Model& model, const std::filesystem::path& path) {
  csv::write_file(path, serialize(model));
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

}  // namespace imbgan::classifiers
