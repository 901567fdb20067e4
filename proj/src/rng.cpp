#include "silcert/rng.hpp"

#include "silcert/statdist.hpp"

namespace silcert::rng {

double normal_variate(SplitMix64& gen, double mean, double sigma) {
  return mean + sigma * statdist::normal_quantile(Probability(gen.uniform_open()));
}

}  // namespace silcert::rng
