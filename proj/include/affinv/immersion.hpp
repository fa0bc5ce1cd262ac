#pragma once

// A hypersurface immersion x: U -> R^{n+1} given by coordinate formulas that
// can be evaluated either on plain doubles or on jets. Jet evaluation takes
// pre-seeded coordinate jets, so a factor chart can live inside a larger
// product variable space.

#include <memory>
#include <string>
#include <vector>

#include "jet.hpp"
#include "linalg.hpp"

namespace affinv {

class Immersion {
public:
    virtual ~Immersion() = default;

    virtual int dim() const = 0;
    int ambient_dim() const { return dim() + 1; }
    virtual bool in_chart(const VecD& point) const = 0;
    virtual std::string describe() const = 0;

    // Plain-double evaluation of the n+1 ambient components.
    virtual VecD values(const VecD& point) const = 0;

    // Evaluation on coordinate jets; vars.size() == dim(), all sharing one
    // (possibly larger) jet dimension.
    virtual std::vector<Jet4> jets(const std::vector<Jet4>& vars) const = 0;

    void require_chart(const VecD& point) const {
        if (static_cast<int>(point.size()) != dim())
            throw DimensionMismatch("point dimension does not match chart");
        if (!in_chart(point))
            throw ChartDomainViolation("point outside chart domain of " + describe());
    }

    // Seed the chart coordinates at `point` as jets of dimension dim().
    std::vector<Jet4> seed(const VecD& point) const {
        require_chart(point);
        std::vector<Jet4> v;
        v.reserve(dim());
        for (int i = 0; i < dim(); ++i)
            v.push_back(Jet4::variable(i, point[i], dim()));
        return v;
    }
};

using ImmersionPtr = std::shared_ptr<const Immersion>;

} // namespace affinv
