#include "mgfusion/granularity/layer_mixer.hpp"

#include "mgfusion/common/error.hpp"

namespace mgf {

template <class T>
LayerMixer<T>::LayerMixer(std::size_t layers, std::size_t dim)
    : weights(diff::Tensor<T>::variable({layers}, std::vector<T>(layers, T(1)))),
      ln_gain(diff::Tensor<T>::variable({dim}, std::vector<T>(dim, T(1)))),
      ln_bias(diff::Tensor<T>::variable({dim}, std::vector<T>(dim, T(0)))) {}

template <class T>
diff::Tensor<T> stack_tensor(const LayeredEmbedding& stack) {
  return diff::Tensor<T>::constant({stack.layers, stack.positions, stack.dim},
                                   std::vector<T>(stack.data.begin(), stack.data.end()));
}

template <class T>
diff::Tensor<T> mix_layers(const LayeredEmbedding& stack, const LayerMixer<T>& mixer) {
  if (mixer.layers() != stack.layers || mixer.dim() != stack.dim) {
    fail(ErrorKind::dimension, "layer mixer for L=" + std::to_string(mixer.layers()) + ", D=" +
                                   std::to_string(mixer.dim()) + " applied to a stack with L=" +
                                   std::to_string(stack.layers) + ", D=" + std::to_string(stack.dim));
  }
  auto averaged = diff::layer_weighted_average(stack_tensor<T>(stack), mixer.weights, kMinLayerWeightSum);
  return diff::layer_norm(averaged, mixer.ln_gain, mixer.ln_bias);
}

template struct LayerMixer<float>;
template struct LayerMixer<double>;
template diff::Tensor<float> stack_tensor<float>(const LayeredEmbedding&);
template diff::Tensor<double> stack_tensor<double>(const LayeredEmbedding&);
template diff::Tensor<float> mix_layers<float>(const LayeredEmbedding&, const LayerMixer<float>&);
template diff::Tensor<double> mix_layers<double>(const LayeredEmbedding&, const LayerMixer<double>&);

}  // namespace mgf
