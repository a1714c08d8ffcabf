#ifndef HYPERFIX_SVG_HPP
#define HYPERFIX_SVG_HPP

#include <string>

#include "hyperfix/iterate.hpp"

namespace hyperfix {

/// Residual-vs-iteration plot on a log-scale y axis, as a small static SVG.
std::string residual_plot_svg(const IterationTrace& trace,
                              const std::string& title);

}  // namespace hyperfix

#endif
