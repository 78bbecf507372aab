#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qisomap/errors.hpp"

namespace qisomap::regsim {

using Amplitude = std::complex<double>;
using Label = std::vector<std::uint64_t>;  // one value per register, layout order

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr double kNormTolerance = 1e-12;

struct RegisterSpec {
    std::string name;
    int width = 1;  // bits
};

struct RegisterLayout {
    std::vector<RegisterSpec> regs;

    int index(const std::string& name) const {
        for (std::size_t i = 0; i < regs.size(); ++i)
            if (regs[i].name == name) return static_cast<int>(i);
        throw LayoutMismatch("no register named '" + name + "'");
    }
    int width(const std::string& name) const { return regs[index(name)].width; }
    int total_width() const {
        int w = 0;
        for (const auto& r : regs) w += r.width;
        return w;
    }
    void validate(int cap_bits = 128) const {
        for (std::size_t i = 0; i < regs.size(); ++i)
            for (std::size_t j = i + 1; j < regs.size(); ++j)
                if (regs[i].name == regs[j].name)
                    throw LayoutMismatch("duplicate register name '" + regs[i].name + "'");
        if (total_width() > cap_bits) throw LayoutMismatch("layout exceeds simulation cap");
    }
    bool operator==(const RegisterLayout& o) const {
        if (regs.size() != o.regs.size()) return false;
        for (std::size_t i = 0; i < regs.size(); ++i)
            if (regs[i].name != o.regs[i].name || regs[i].width != o.regs[i].width) return false;
        return true;
    }
};

inline std::uint64_t reg_mask(int width) {
    return width >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << width) - 1;
}

struct RegisterState {
    RegisterLayout layout;
    std::map<Label, Amplitude> terms;

    double norm_sq() const {
        double s = 0;
        for (const auto& [label, amp] : terms) s += std::norm(amp);
        return s;
    }

    void prune() {
        for (auto it = terms.begin(); it != terms.end();) {
            if (std::abs(it->second) < kPruneThreshold)
                it = terms.erase(it);
            else
                ++it;
        }
    }

    void check_normalized() const {
        double s = norm_sq();
        if (std::fabs(s - 1.0) > kNormTolerance)
            throw std::runtime_error("state norm " + std::to_string(s) + " drifted from 1");
    }

    // One line per term: |v0>|v1>...  amp=a+bi
    std::string dump() const {
        std::ostringstream os;
        for (const auto& [label, amp] : terms) {
            for (std::size_t r = 0; r < label.size(); ++r) os << "|" << label[r] << ">";
            os << "  amp=" << amp.real() << (amp.imag() < 0 ? "-" : "+")
               << std::fabs(amp.imag()) << "i\n";
        }
        return os.str();
    }
};

// Applies a label permutation to every basis term; amplitudes on colliding
// labels accumulate, which is exactly linearity of the underlying map.
inline RegisterState map_labels(const RegisterState& s, const std::function<void(Label&)>& fn) {
    RegisterState out;
    out.layout = s.layout;
    for (const auto& [label, amp] : s.terms) {
        Label l = label;
        fn(l);
        out.terms[l] += amp;
    }
    out.prune();
    return out;
}

// Reversible ops record their inverses here; uncompute replays them backwards.
struct OpLog {
    std::vector<std::function<void(Label&)>> inverses;
    void record(std::function<void(Label&)> inv) { inverses.push_back(std::move(inv)); }
    bool empty() const { return inverses.empty(); }
};

// --- composite-word access (registers listed MSB-first) ---

inline std::uint64_t read_word(const Label& l, const std::vector<int>& regs,
                               const std::vector<int>& widths) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < regs.size(); ++i) v = (v << widths[i]) | l[regs[i]];
    return v;
}

inline void write_word(Label& l, const std::vector<int>& regs, const std::vector<int>& widths,
                       std::uint64_t v) {
    for (std::size_t i = regs.size(); i-- > 0;) {
        l[regs[i]] = v & reg_mask(widths[i]);
        v >>= widths[i];
    }
}

// --- primitive operations ---

// (1/N) sum_{i,j} |i>|j>|lookup(i,j)>|0>... with all other registers zero.
inline RegisterState init_uniform(const RegisterLayout& layout, int n, const std::string& i_reg,
                                  const std::string& j_reg, const std::string& value_reg,
                                  const std::function<std::uint64_t(int, int)>& lookup,
                                  int cap_bits = 128) {
    layout.validate(cap_bits);
    RegisterState s;
    s.layout = layout;
    int ii = layout.index(i_reg), jj = layout.index(j_reg), vv = layout.index(value_reg);
    if ((std::uint64_t)n > reg_mask(layout.regs[ii].width) + 1 ||
        (std::uint64_t)n > reg_mask(layout.regs[jj].width) + 1)
        throw LayoutMismatch("index register too narrow for n");
    double amp = 1.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Label l(layout.regs.size(), 0);
            l[ii] = i;
            l[jj] = j;
            l[vv] = lookup(i, j) & reg_mask(layout.regs[vv].width);
            s.terms[l] = amp;
        }
    return s;
}

// flag := 0 where index == k, else 1 (XOR form, so it is its own inverse).
inline RegisterState equality_flag(const RegisterState& s, std::uint64_t k,
                                   const std::string& index_reg, const std::string& flag_reg,
                                   OpLog* log = nullptr) {
    int ir = s.layout.index(index_reg), fr = s.layout.index(flag_reg);
    for (const auto& [label, amp] : s.terms)
        if (label[fr] != 0) throw FlagNotClean("equality_flag: '" + flag_reg + "' not zero");
    auto fn = [ir, fr, k](Label& l) { l[fr] ^= (l[ir] != k) ? 1u : 0u; };
    if (log) log->record(fn);
    return map_labels(s, fn);
}

// flag == 0: target ^= lookup(label); flag == 1 and fill_ones: target ^= 11...1.
inline RegisterState controlled_load(const RegisterState& s, const std::string& flag_reg,
                                     const std::string& target_reg,
                                     const std::function<std::uint64_t(const Label&)>& lookup,
                                     bool fill_ones, OpLog* log = nullptr) {
    int fr = s.layout.index(flag_reg), tr = s.layout.index(target_reg);
    std::uint64_t m = reg_mask(s.layout.regs[tr].width);
    for (const auto& [label, amp] : s.terms)
        if (label[tr] != 0) throw TargetNotClean("controlled_load: '" + target_reg + "' not zero");
    auto fn = [fr, tr, m, lookup, fill_ones](Label& l) {
        if (l[fr] == 0)
            l[tr] ^= lookup(l) & m;
        else if (fill_ones)
            l[tr] ^= m;
    };
    if (log) log->record(fn);
    return map_labels(s, fn);
}

// Unconditional XOR of a lookup value into a register (CNOT fan; self-inverse).
inline RegisterState xor_load(const RegisterState& s, const std::string& target_reg,
                              const std::function<std::uint64_t(const Label&)>& lookup,
                              OpLog* log = nullptr) {
    int tr = s.layout.index(target_reg);
    std::uint64_t m = reg_mask(s.layout.regs[tr].width);
    auto fn = [tr, m, lookup](Label& l) { l[tr] ^= lookup(l) & m; };
    if (log) log->record(fn);
    return map_labels(s, fn);
}

// dst (composite word, MSB-first; leading register is the carry/overflow bit)
// += src, modulo the composite width.
inline RegisterState add_into(const RegisterState& s, const std::string& src_reg,
                              const std::vector<std::string>& dst_regs, OpLog* log = nullptr) {
    int sr = s.layout.index(src_reg);
    std::vector<int> regs, widths;
    int total = 0;
    for (const auto& name : dst_regs) {
        int r = s.layout.index(name);
        regs.push_back(r);
        widths.push_back(s.layout.regs[r].width);
        total += s.layout.regs[r].width;
    }
    std::uint64_t wm = reg_mask(total);
    auto fwd = [sr, regs, widths, wm](Label& l) {
        write_word(l, regs, widths, (read_word(l, regs, widths) + l[sr]) & wm);
    };
    auto inv = [sr, regs, widths, wm](Label& l) {
        write_word(l, regs, widths, (read_word(l, regs, widths) - l[sr]) & wm);
    };
    if (log) log->record(inv);
    return map_labels(s, fwd);
}

// block (composite word, MSB-first) -= minuend, two's complement. With the
// block's top bit pre-set, the top bit ends up 0 exactly when the payload word
// was strictly smaller than the minuend -- a comparator that leaves no extra
// entanglement behind.
inline RegisterState subtract_compare(const RegisterState& s, const std::string& minuend_reg,
                                      const std::vector<std::string>& block_regs,
                                      OpLog* log = nullptr) {
    int mr = s.layout.index(minuend_reg);
    std::vector<int> regs, widths;
    int total = 0;
    for (const auto& name : block_regs) {
        int r = s.layout.index(name);
        regs.push_back(r);
        widths.push_back(s.layout.regs[r].width);
        total += s.layout.regs[r].width;
    }
    std::uint64_t wm = reg_mask(total);
    auto fwd = [mr, regs, widths, wm](Label& l) {
        write_word(l, regs, widths, (read_word(l, regs, widths) - l[mr]) & wm);
    };
    auto inv = [mr, regs, widths, wm](Label& l) {
        write_word(l, regs, widths, (read_word(l, regs, widths) + l[mr]) & wm);
    };
    if (log) log->record(inv);
    return map_labels(s, fwd);
}

// Where flag == 0: dst ^= ref, then dst ^= src. With dst holding a copy of ref
// this replaces dst by src, and the XOR pair keeps the map reversible.
inline RegisterState conditional_replace(const RegisterState& s, const std::string& flag_reg,
                                         const std::string& dst_reg, const std::string& src_reg,
                                         const std::string& ref_reg, OpLog* log = nullptr) {
    int fr = s.layout.index(flag_reg), dr = s.layout.index(dst_reg);
    int sr = s.layout.index(src_reg), rr = s.layout.index(ref_reg);
    auto fn = [fr, dr, sr, rr](Label& l) {
        if (l[fr] == 0) l[dr] ^= l[rr] ^ l[sr];
    };
    if (log) log->record(fn);
    return map_labels(s, fn);
}

// X gates across a whole register (self-inverse).
inline RegisterState bit_flip(const RegisterState& s, const std::string& reg,
                              OpLog* log = nullptr) {
    int r = s.layout.index(reg);
    std::uint64_t m = reg_mask(s.layout.regs[r].width);
    auto fn = [r, m](Label& l) { l[r] ^= m; };
    if (log) log->record(fn);
    return map_labels(s, fn);
}

// |a_m ... a_1 0> -> |a_m a_m ... a_1>: exact halving of the two's-complement
// value, requires a zero LSB. The sign bit is copied down so negative words
// halve correctly; on even inputs this is injective, hence reversible.
inline RegisterState shift_right(const RegisterState& s, const std::string& reg,
                                 OpLog* log = nullptr) {
    int r = s.layout.index(reg);
    int w = s.layout.regs[r].width;
    std::uint64_t m = reg_mask(w);
    std::uint64_t sign = std::uint64_t(1) << (w - 1);
    for (const auto& [label, amp] : s.terms)
        if (label[r] & 1u) throw OddValue("shift_right: LSB set in register '" + reg + "'");
    auto fwd = [r, sign](Label& l) { l[r] = (l[r] >> 1) | (l[r] & sign); };
    auto inv = [r, m](Label& l) { l[r] = (l[r] << 1) & m; };
    if (log) log->record(inv);
    return map_labels(s, fwd);
}

// Replays the logged inverses in reverse order, then verifies that every
// surviving term has zero in all named ancilla registers.
inline RegisterState uncompute(const RegisterState& s, const OpLog& log,
                               const std::vector<std::string>& ancilla_regs) {
    RegisterState out = s;
    for (auto it = log.inverses.rbegin(); it != log.inverses.rend(); ++it)
        out = map_labels(out, *it);
    for (const auto& name : ancilla_regs) {
        int r = out.layout.index(name);
        for (const auto& [label, amp] : out.terms)
            if (label[r] != 0 && std::abs(amp) >= kNormTolerance)
                throw DirtyAncilla("uncompute left register '" + name + "' nonzero");
    }
    return out;
}

// Largest amplitude sitting on a term whose ancilla registers are not all zero.
inline double dirty_amplitude(const RegisterState& s, const std::vector<std::string>& ancilla_regs) {
    double worst = 0;
    std::vector<int> idx;
    for (const auto& name : ancilla_regs) idx.push_back(s.layout.index(name));
    for (const auto& [label, amp] : s.terms)
        for (int r : idx)
            if (label[r] != 0) worst = std::max(worst, std::abs(amp));
    return worst;
}

enum class QdacMode { Sqrt, Linear };

// Digital-to-amplitude transfer: rebuilds amplitudes from the register values
// (sqrt(v/G) or v/sqrt(C)) and reports the post-selection success probability
// of the ancilla-rotation it stands in for.
inline std::pair<RegisterState, double> qdac_amplitude(
    const RegisterState& s, const std::string& value_reg, QdacMode mode,
    const std::function<double(std::uint64_t)>& decode_value) {
    int vr = s.layout.index(value_reg);
    double vmax = 0;
    for (const auto& [label, amp] : s.terms)
        vmax = std::max(vmax, std::fabs(decode_value(label[vr])));
    if (vmax == 0) throw AllZeroValues("qdac_amplitude: all register values are zero");

    double success = 0, total = 0;
    RegisterState out;
    out.layout = s.layout;
    for (const auto& [label, amp] : s.terms) {
        double v = decode_value(label[vr]);
        if (mode == QdacMode::Sqrt) {
            if (v < 0) throw OverflowError("qdac_amplitude: negative value in sqrt mode");
            success += std::norm(amp) * (v / vmax);
            total += v;
            if (v > 0) out.terms[label] = std::sqrt(v);
        } else {
            success += std::norm(amp) * (v / vmax) * (v / vmax);
            total += v * v;
            if (v != 0) out.terms[label] = v;
        }
    }
    if (total <= 0) throw AllZeroValues("qdac_amplitude: normalizer vanished");
    double scale = 1.0 / std::sqrt(total);
    for (auto& [label, amp] : out.terms) amp *= scale;
    out.prune();
    return {out, success};
}

}  // namespace qisomap::regsim
