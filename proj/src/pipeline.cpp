#include "crmot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace crmot {

std::vector<DescriptionResult> evaluate_all(const Scene& scene,
                                            std::span<const LanguageDescription> descriptions,
                                            std::span<const std::vector<Track>> predictions,
                                            const MetricConfig& config, unsigned jobs) {
  if (descriptions.size() != predictions.size()) {
    throw std::invalid_argument("evaluate_all: one prediction set per description is required");
  }
  config.validate();
  std::vector<DescriptionResult> results(descriptions.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, descriptions.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < descriptions.size(); i = next++) {
      try {
        results[i] = evaluate_description(scene, descriptions[i], predictions[i], config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace crmot
