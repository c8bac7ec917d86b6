#pragma once

#include "lsym/syntax.hpp"

namespace lsym {

// Parser-side tree; sugar is still present.  Lowering turns this into the
// ANF core in syntax.hpp.
struct SurfaceExpr {
  enum Kind {
    Var, Int, PSet, List, PairK, BinOpK, MuxK, IfK, LetK, ParK, FunK, AppK,
    CaseSumK, CasePSetK, InjK, ProjK, RefK, DerefK, AssignK, ReadK, WriteK,
    ShareK, RevealK
  };
  Kind kind = Int;
  int line = 0, col = 0;

  std::string name;                 // Var
  int64_t value = 0;                // Int
  std::vector<std::string> members; // PSet: principal names or pset variables
  std::vector<std::shared_ptr<SurfaceExpr>> items;  // List / PairK / args
  BinOp op = BinOp::Add;            // BinOpK
  std::shared_ptr<SurfaceExpr> a, b, c;  // generic operand slots
  std::vector<std::string> params;  // FunK (curried), CaseSum binders
  std::string binder1, binder2;     // LetK binder / case binders
  std::string annotation;           // Share/Reveal inert protocol+type metadata
};
using SExprPtr = std::shared_ptr<SurfaceExpr>;

struct SurfaceDef {
  std::string name;
  bool brec = false;
  // Each parameter is a tuple pattern: empty = "()", one entry = plain
  // variable, several = components bound via fst/snd.
  std::vector<std::vector<std::string>> params;
  SExprPtr body;
  int line = 0, col = 0;
};

}  // namespace lsym
