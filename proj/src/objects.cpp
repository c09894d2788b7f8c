#include "psim/objects.hpp"

#include <stdexcept>

namespace psim {

namespace {

const std::string& sym_name(const NameContext& ctx, int32_t sym) {
    if (!ctx.symbols || sym < 0 || sym >= static_cast<int32_t>(ctx.symbols->size()))
        throw std::out_of_range("spell: symbol index out of range");
    return (*ctx.symbols)[sym];
}

const std::string& state_name(const NameContext& ctx, int32_t q) {
    if (!ctx.states || q < 0 || q >= static_cast<int32_t>(ctx.states->size()))
        throw std::out_of_range("spell: state index out of range");
    return (*ctx.states)[q];
}

}  // namespace

std::string spell(const PObject& obj, const NameContext& ctx) {
    struct Visitor {
        const NameContext& ctx;

        std::string operator()(const OpaqueObj& o) const { return o.name; }

        std::string operator()(const TapeObj& o) const {
            return sym_name(ctx, o.sym) + "[" + std::to_string(o.cell) + "," +
                   std::to_string(o.time) + "," + std::to_string(o.phase) + "]";
        }

        std::string operator()(const StateObj& o) const {
            std::string s = state_name(ctx, o.state) + "[" +
                            std::to_string(o.cell) + "," +
                            std::to_string(o.time) + "," +
                            std::to_string(o.phase);
            if (const auto* sym = std::get_if<int32_t>(&o.tag)) {
                s += ";" + sym_name(ctx, *sym);
            } else if (const auto* ch = std::get_if<TransitionChoice>(&o.tag)) {
                s += ";(" + state_name(ctx, ch->state) + "," +
                     sym_name(ctx, ch->sym) + "," + std::to_string(ch->dest) +
                     ")";
            }
            return s + "]";
        }

        std::string operator()(const InitTapeObj& o) const {
            return sym_name(ctx, o.sym) + "[" + std::to_string(o.cell) + "]";
        }

        std::string operator()(const InitStateObj&) const { return "qI"; }

        std::string operator()(const TimerObj& o) const {
            return "T[" + std::to_string(o.remaining) + ";" +
                   (o.accept ? "yes" : "no") + "]";
        }

        std::string operator()(const VerdictObj& o) const {
            return o.accept ? "yes" : "no";
        }
    };
    return std::visit(Visitor{ctx}, obj);
}

}  // namespace psim
