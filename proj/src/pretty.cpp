#include <sstream>

#include "lsym/syntax.hpp"

namespace lsym {

namespace {

void pp_expr(const ExprPtr &e, std::ostream &os);

void pp_atom(const Atom &a, std::ostream &os) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AVar>) os << n.name;
        else if constexpr (std::is_same_v<T, ALit>) os << n.value;
        else if constexpr (std::is_same_v<T, APSetLit>) os << pset_to_string(n.parties);
        else if constexpr (std::is_same_v<T, ABinOp>)
          os << n.lhs << " " << binop_symbol(n.op) << " " << n.rhs;
        else if constexpr (std::is_same_v<T, AMux>)
          os << "mux if " << n.cond << " then " << n.on_true << " else " << n.on_false;
        else if constexpr (std::is_same_v<T, AInj>)
          os << "inj" << n.index << " " << n.payload;
        else if constexpr (std::is_same_v<T, APair>)
          os << "(" << n.first << ", " << n.second << ")";
        else if constexpr (std::is_same_v<T, AProj>)
          os << (n.index == 1 ? "fst " : "snd ") << n.payload;
        else if constexpr (std::is_same_v<T, AFun>) {
          os << "fun [" << n.self << "] " << n.param << " -> ";
          pp_expr(n.body, os);
        } else if constexpr (std::is_same_v<T, ARef>) os << "ref " << n.init;
        else if constexpr (std::is_same_v<T, ADeref>) os << "!" << n.ref;
        else if constexpr (std::is_same_v<T, AAssign>) os << n.ref << " := " << n.value;
        else if constexpr (std::is_same_v<T, ARead>) os << "read";
        else if constexpr (std::is_same_v<T, AWrite>) os << "write " << n.value;
        else if constexpr (std::is_same_v<T, AShare>)
          os << "share [ " << n.src << " -> " << n.dst << " ] " << n.payload;
        else
          os << "reveal [ " << n.src << " -> " << n.dst << " ] " << n.payload;
      },
      a);
}

void pp_expr(const ExprPtr &e, std::ostream &os) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EAtom>) {
          pp_atom(n.atom, os);
        } else if constexpr (std::is_same_v<T, ECaseSum>) {
          os << "case " << n.subject << " { inj1 " << n.binder1 << " -> ";
          pp_expr(n.branch1, os);
          os << " ; inj2 " << n.binder2 << " -> ";
          pp_expr(n.branch2, os);
          os << " }";
        } else if constexpr (std::is_same_v<T, ECasePSet>) {
          os << "case " << n.subject << " { {} -> ";
          pp_expr(n.on_empty, os);
          os << " ; {" << n.head_binder << "} \\/ " << n.tail_binder << " -> ";
          pp_expr(n.on_cons, os);
          os << " }";
        } else if constexpr (std::is_same_v<T, EApp>) {
          os << n.fn << " " << n.arg;
        } else if constexpr (std::is_same_v<T, EPar>) {
          os << "par " << n.pset << " ";
          pp_expr(n.body, os);
        } else if constexpr (std::is_same_v<T, ELet>) {
          os << "let " << n.binder << " = ";
          pp_expr(n.bound, os);
          os << " in\n";
          pp_expr(n.body, os);
        } else {
          os << "if " << n.cond << " then ";
          pp_expr(n.on_true, os);
          os << " else ";
          pp_expr(n.on_false, os);
        }
      },
      e->node);
}

}  // namespace

std::string pretty(const ExprPtr &e) {
  std::ostringstream os;
  pp_expr(e, os);
  return os.str();
}

}  // namespace lsym
