#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "spatia/scene.hpp"
#include "spatia/wav.hpp"

namespace spatia {

struct RenderOutput {
  AudioBuffer audio;
  /// Set when the output channels are an Ambisonic signal set.
  std::optional<AmbisonicFormat> ambisonic_format;
};

class Renderer {
public:
  /// Validates the scene (ValidationError on any issue) and prepares the panner.
  explicit Renderer(Scene scene);
  ~Renderer();
  Renderer(Renderer&&) noexcept;
  Renderer& operator=(Renderer&&) noexcept;

  const Scene& scene() const noexcept { return scene_; }
  /// Channels of the mixing bus: speakers, or Ambisonic components.
  std::size_t bus_channels() const noexcept;
  /// Channels of the final output.
  std::size_t output_channels() const noexcept;

  /// Coefficients applied to source `index` at time t, before crossfading. For
  /// Ambisonic scenes these are the (gain-scaled) encoding coefficients.
  /// Throws RenderError naming the source and time when the panner fails.
  GainVector coefficients(std::size_t index, double t) const;

  /// Mono signal of source `index` over the scene duration.
  std::vector<double> source_signal(std::size_t index) const;

  RenderOutput render() const;

private:
  struct Impl;
  Scene scene_;
  std::unique_ptr<Impl> impl_;
};

inline RenderOutput render(const Scene& scene) { return Renderer(scene).render(); }

} // namespace spatia
