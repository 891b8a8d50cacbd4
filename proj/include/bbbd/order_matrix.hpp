#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace bbbd {

// N x N pairwise occlusion order over {-1, 0, 1}. cells[i][j] = 1 means
// instance i occludes instance j, -1 means i is occluded by j, 0 means no
// relation. Antisymmetric with a zero diagonal by construction: writes go
// through set_pair, which fills both mirror cells.
class OrderMatrix {
public:
    OrderMatrix() = default;

    explicit OrderMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

    [[nodiscard]] std::size_t size() const { return n_; }

    [[nodiscard]] int at(std::size_t i, std::size_t j) const {
        assert(i < n_ && j < n_);
        return cells_[i * n_ + j];
    }

    void set_pair(std::size_t i, std::size_t j, int value) {
        assert(i < n_ && j < n_ && i != j);
        assert(value == -1 || value == 0 || value == 1);
        cells_[i * n_ + j] = static_cast<std::int8_t>(value);
        cells_[j * n_ + i] = static_cast<std::int8_t>(-value);
    }

    [[nodiscard]] bool antisymmetric() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (at(i, j) != -at(j, i)) return false;
        return true;
    }

    [[nodiscard]] bool zero_diagonal() const {
        for (std::size_t i = 0; i < n_; ++i)
            if (at(i, i) != 0) return false;
        return true;
    }

    friend bool operator==(const OrderMatrix&, const OrderMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::int8_t> cells_;
};

} // namespace bbbd
