#include <cctype>
#include <cstdlib>

#include "lsym/surface.hpp"
#include "lsym/syntax.hpp"

namespace lsym {

namespace {

enum class Tok {
  Ident, Int, String,
  KwPrincipal, KwDef, KwBrec, KwLet, KwIn, KwPar, KwIf, KwThen, KwElse,
  KwMux, KwCase, KwFun, KwRef, KwRead, KwWrite, KwShare, KwReveal,
  KwTrue, KwFalse, KwInj1, KwInj2, KwFst, KwSnd,
  Eq, Arrow, LBrace, RBrace, LBrack, RBrack, LParen, RParen,
  Comma, Semi, Colon, Assign, Bang,
  Plus, Minus, Star, Percent, EqEq, Lt, Le, Ge, AndAnd, OrOr, Caret, Union,
  End
};

struct Token {
  Tok kind;
  std::string text;
  int64_t value = 0;
  int line = 1, col = 1;
};

std::vector<Token> lex(const std::string &src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; k++) {
      if (src[i + k] == '\n') { line++; col = 1; } else col++;
    }
    i += n;
  };
  auto push = [&](Tok k, const std::string &t, int64_t v = 0) {
    out.push_back(Token{k, t, v, line, col});
    advance(t.size());
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      int base = 10;
      if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'b' || src[j + 1] == 'x')) {
        base = src[j + 1] == 'b' ? 2 : 16;
        j += 2;
      }
      size_t start_digits = j;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])))) j++;
      std::string text = src.substr(i, j - i);
      std::string digits = src.substr(start_digits, j - start_digits);
      if (digits.empty()) throw ParseError("bad integer literal", line, col);
      errno = 0;
      uint64_t v = std::strtoull(digits.c_str(), nullptr, base);
      out.push_back(Token{Tok::Int, text, static_cast<int64_t>(v), line, col});
      advance(text.size());
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        j++;
      std::string w = src.substr(i, j - i);
      Tok k = Tok::Ident;
      if (w == "principal" || w == "party") k = Tok::KwPrincipal;
      else if (w == "def") k = Tok::KwDef;
      else if (w == "brec") k = Tok::KwBrec;
      else if (w == "let") k = Tok::KwLet;
      else if (w == "in") k = Tok::KwIn;
      else if (w == "par") k = Tok::KwPar;
      else if (w == "if") k = Tok::KwIf;
      else if (w == "then") k = Tok::KwThen;
      else if (w == "else") k = Tok::KwElse;
      else if (w == "mux") k = Tok::KwMux;
      else if (w == "case") k = Tok::KwCase;
      else if (w == "fun") k = Tok::KwFun;
      else if (w == "ref") k = Tok::KwRef;
      else if (w == "read") k = Tok::KwRead;
      else if (w == "write") k = Tok::KwWrite;
      else if (w == "share") k = Tok::KwShare;
      else if (w == "reveal") k = Tok::KwReveal;
      else if (w == "true") k = Tok::KwTrue;
      else if (w == "false") k = Tok::KwFalse;
      else if (w == "inj1") k = Tok::KwInj1;
      else if (w == "inj2") k = Tok::KwInj2;
      else if (w == "fst") k = Tok::KwFst;
      else if (w == "snd") k = Tok::KwSnd;
      push(k, w);
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"') j++;
      if (j >= src.size()) throw ParseError("unterminated string", line, col);
      std::string w = src.substr(i, j - i + 1);
      out.push_back(Token{Tok::String, w, 0, line, col});
      advance(w.size());
      continue;
    }
    auto two = [&](const char *s) {
      return i + 1 < src.size() && src[i] == s[0] && src[i + 1] == s[1];
    };
    if (two("->")) { push(Tok::Arrow, "->"); continue; }
    if (two(":=")) { push(Tok::Assign, ":="); continue; }
    if (two("==")) { push(Tok::EqEq, "=="); continue; }
    if (two("<=")) { push(Tok::Le, "<="); continue; }
    if (two(">=")) { push(Tok::Ge, ">="); continue; }
    if (two("&&")) { push(Tok::AndAnd, "&&"); continue; }
    if (two("||")) { push(Tok::OrOr, "||"); continue; }
    if (two("\\/")) { push(Tok::Union, "\\/"); continue; }
    switch (c) {
      case '=': push(Tok::Eq, "="); continue;
      case '{': push(Tok::LBrace, "{"); continue;
      case '}': push(Tok::RBrace, "}"); continue;
      case '[': push(Tok::LBrack, "["); continue;
      case ']': push(Tok::RBrack, "]"); continue;
      case '(': push(Tok::LParen, "("); continue;
      case ')': push(Tok::RParen, ")"); continue;
      case ',': push(Tok::Comma, ","); continue;
      case ';': push(Tok::Semi, ";"); continue;
      case ':': push(Tok::Colon, ":"); continue;
      case '!': push(Tok::Bang, "!"); continue;
      case '+': push(Tok::Plus, "+"); continue;
      case '-': push(Tok::Minus, "-"); continue;
      case '*': push(Tok::Star, "*"); continue;
      case '%': push(Tok::Percent, "%"); continue;
      case '<': push(Tok::Lt, "<"); continue;
      case '^': push(Tok::Caret, "^"); continue;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back(Token{Tok::End, "", 0, line, col});
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token &peek(size_t k = 0) const {
    size_t j = pos + k;
    if (j >= toks.size()) j = toks.size() - 1;
    return toks[j];
  }
  const Token &next() { const Token &t = peek(); if (t.kind != Tok::End) pos++; return t; }
  bool at(Tok k) const { return peek().kind == k; }
  bool eat(Tok k) { if (at(k)) { next(); return true; } return false; }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    throw ParseError(msg + " (found '" + (t.kind == Tok::End ? "<eof>" : t.text) + "')",
                     t.line, t.col);
  }
  Token expect(Tok k, const char *what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }

  SExprPtr node(SurfaceExpr::Kind k) {
    auto n = std::make_shared<SurfaceExpr>();
    n->kind = k;
    n->line = peek().line;
    n->col = peek().col;
    return n;
  }

  bool starts_unary(Tok k) const {
    switch (k) {
      case Tok::Ident: case Tok::Int: case Tok::KwTrue: case Tok::KwFalse:
      case Tok::KwRead: case Tok::LParen: case Tok::LBrace: case Tok::LBrack:
      case Tok::Bang: case Tok::KwRef: case Tok::KwWrite: case Tok::KwInj1:
      case Tok::KwInj2: case Tok::KwFst: case Tok::KwSnd: case Tok::KwShare:
      case Tok::KwReveal:
        return true;
      default:
        return false;
    }
  }

  SExprPtr parse_expr() {
    switch (peek().kind) {
      case Tok::KwLet: {
        auto n = node(SurfaceExpr::LetK);
        next();
        n->binder1 = expect(Tok::Ident, "binder").text;
        expect(Tok::Eq, "'='");
        n->a = parse_expr();
        expect(Tok::KwIn, "'in'");
        n->b = parse_expr();
        return n;
      }
      case Tok::KwPar: {
        auto n = node(SurfaceExpr::ParK);
        next();
        n->a = parse_unary();
        n->b = parse_expr();
        return n;
      }
      case Tok::KwIf: {
        auto n = node(SurfaceExpr::IfK);
        next();
        n->a = parse_expr();
        expect(Tok::KwThen, "'then'");
        n->b = parse_expr();
        expect(Tok::KwElse, "'else'");
        n->c = parse_expr();
        return n;
      }
      case Tok::KwMux: {
        auto n = node(SurfaceExpr::MuxK);
        next();
        expect(Tok::KwIf, "'if' after 'mux'");
        n->a = parse_expr();
        expect(Tok::KwThen, "'then'");
        n->b = parse_expr();
        expect(Tok::KwElse, "'else'");
        n->c = parse_expr();
        return n;
      }
      case Tok::KwFun: {
        auto n = node(SurfaceExpr::FunK);
        next();
        if (eat(Tok::LBrack)) {  // optional explicit self binder: fun [f] x -> e
          n->name = expect(Tok::Ident, "self binder").text;
          expect(Tok::RBrack, "']'");
        }
        while (at(Tok::Ident)) n->params.push_back(next().text);
        if (n->params.empty()) fail("expected parameter after 'fun'");
        expect(Tok::Arrow, "'->'");
        n->a = parse_expr();
        return n;
      }
      case Tok::KwCase:
        return parse_case();
      default:
        return parse_assign();
    }
  }

  SExprPtr parse_case() {
    auto start = node(SurfaceExpr::CaseSumK);
    expect(Tok::KwCase, "'case'");
    SExprPtr subject = parse_unary();  // parenthesize complex subjects
    expect(Tok::LBrace, "'{' of case arms");
    if (at(Tok::KwInj1)) {
      auto n = start;
      n->kind = SurfaceExpr::CaseSumK;
      n->a = subject;
      next();
      n->binder1 = expect(Tok::Ident, "inj1 binder").text;
      expect(Tok::Arrow, "'->'");
      n->b = parse_expr();
      expect(Tok::Semi, "';'");
      expect(Tok::KwInj2, "'inj2' arm");
      n->binder2 = expect(Tok::Ident, "inj2 binder").text;
      expect(Tok::Arrow, "'->'");
      n->c = parse_expr();
      expect(Tok::RBrace, "'}'");
      return n;
    }
    // pset case: { {} -> e ; {p} \/ Q -> e }
    auto n = start;
    n->kind = SurfaceExpr::CasePSetK;
    n->a = subject;
    expect(Tok::LBrace, "'{}' arm");
    expect(Tok::RBrace, "'{}' arm");
    expect(Tok::Arrow, "'->'");
    n->b = parse_expr();
    expect(Tok::Semi, "';'");
    expect(Tok::LBrace, "'{p}' pattern");
    n->binder1 = expect(Tok::Ident, "selected-party binder").text;
    expect(Tok::RBrace, "'}'");
    expect(Tok::Union, "'\\/'");
    n->binder2 = expect(Tok::Ident, "rest binder").text;
    expect(Tok::Arrow, "'->'");
    n->c = parse_expr();
    expect(Tok::RBrace, "'}'");
    return n;
  }

  SExprPtr parse_assign() {
    SExprPtr lhs = parse_or();
    if (at(Tok::Assign)) {
      auto n = node(SurfaceExpr::AssignK);
      next();
      n->a = lhs;
      n->b = parse_expr();
      return n;
    }
    return lhs;
  }

  SExprPtr binop_node(BinOp op, SExprPtr a, SExprPtr b) {
    auto n = std::make_shared<SurfaceExpr>();
    n->kind = SurfaceExpr::BinOpK;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->line = n->a->line;
    n->col = n->a->col;
    return n;
  }

  SExprPtr parse_or() {
    SExprPtr e = parse_and();
    while (eat(Tok::OrOr)) e = binop_node(BinOp::Or, e, parse_and());
    return e;
  }
  SExprPtr parse_and() {
    SExprPtr e = parse_cmp();
    while (eat(Tok::AndAnd)) e = binop_node(BinOp::And, e, parse_cmp());
    return e;
  }
  SExprPtr parse_cmp() {
    SExprPtr e = parse_union();
    if (at(Tok::EqEq) || at(Tok::Lt) || at(Tok::Le) || at(Tok::Ge)) {
      Tok k = next().kind;
      BinOp op = k == Tok::EqEq ? BinOp::Eq
                 : k == Tok::Lt ? BinOp::Lt
                 : k == Tok::Le ? BinOp::Le : BinOp::Ge;
      e = binop_node(op, e, parse_union());
    }
    return e;
  }
  SExprPtr parse_union() {
    SExprPtr e = parse_xor();
    while (eat(Tok::Union)) e = binop_node(BinOp::Union, e, parse_xor());
    return e;
  }
  SExprPtr parse_xor() {
    SExprPtr e = parse_add();
    while (eat(Tok::Caret)) e = binop_node(BinOp::Xor, e, parse_add());
    return e;
  }
  SExprPtr parse_add() {
    SExprPtr e = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = next().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      e = binop_node(op, e, parse_mul());
    }
    return e;
  }
  SExprPtr parse_mul() {
    SExprPtr e = parse_app();
    while (at(Tok::Star) || at(Tok::Percent)) {
      BinOp op = next().kind == Tok::Star ? BinOp::Mul : BinOp::Mod;
      e = binop_node(op, e, parse_app());
    }
    return e;
  }
  SExprPtr parse_app() {
    SExprPtr e = parse_unary();
    while (starts_unary(peek().kind)) {
      auto n = std::make_shared<SurfaceExpr>();
      n->kind = SurfaceExpr::AppK;
      n->a = e;
      n->b = parse_unary();
      n->line = e->line;
      n->col = e->col;
      e = n;
    }
    return e;
  }

  SExprPtr parse_unary() {
    switch (peek().kind) {
      case Tok::Minus: {
        // negative integer literal only
        auto n = node(SurfaceExpr::Int);
        next();
        Token t = expect(Tok::Int, "integer after unary '-'");
        n->value = -t.value;
        return n;
      }
      case Tok::Bang: {
        auto n = node(SurfaceExpr::DerefK);
        next();
        n->a = parse_unary();
        return n;
      }
      case Tok::KwRef: {
        auto n = node(SurfaceExpr::RefK);
        next();
        n->a = parse_unary();
        return n;
      }
      case Tok::KwWrite: {
        auto n = node(SurfaceExpr::WriteK);
        next();
        n->a = parse_unary();
        return n;
      }
      case Tok::KwInj1: case Tok::KwInj2: {
        auto n = node(SurfaceExpr::InjK);
        n->value = peek().kind == Tok::KwInj1 ? 1 : 2;
        next();
        n->a = parse_unary();
        return n;
      }
      case Tok::KwFst: case Tok::KwSnd: {
        auto n = node(SurfaceExpr::ProjK);
        n->value = peek().kind == Tok::KwFst ? 1 : 2;
        next();
        n->a = parse_unary();
        return n;
      }
      case Tok::KwShare: case Tok::KwReveal: {
        auto n = node(peek().kind == Tok::KwShare ? SurfaceExpr::ShareK
                                                  : SurfaceExpr::RevealK);
        next();
        parse_share_bracket(*n);
        n->c = parse_unary();
        return n;
      }
      default:
        return parse_primary();
    }
  }

  // [proto, type : P -> Q] or [P -> Q]; proto/type kept as inert text.
  void parse_share_bracket(SurfaceExpr &n) {
    expect(Tok::LBrack, "'['");
    // Scan for a ':' at this bracket depth before the closing ']'.
    int depth = 0;
    bool has_colon = false;
    for (size_t j = pos; j < toks.size(); j++) {
      Tok k = toks[j].kind;
      if (k == Tok::LBrack || k == Tok::LParen || k == Tok::LBrace) depth++;
      else if (k == Tok::RParen || k == Tok::RBrace) depth--;
      else if (k == Tok::RBrack) { if (depth == 0) break; depth--; }
      else if (k == Tok::Colon && depth == 0) { has_colon = true; break; }
      else if (k == Tok::Arrow && depth == 0) break;
    }
    if (has_colon) {
      std::string meta;
      while (!at(Tok::Colon)) {
        if (at(Tok::End)) fail("unterminated share annotation");
        if (!meta.empty()) meta += " ";
        meta += next().text;
      }
      next();  // ':'
      n.annotation = meta;
    } else if (at(Tok::Ident) && peek(1).kind == Tok::Comma) {
      n.annotation = next().text;
      next();  // ','
    }
    n.a = parse_expr();
    expect(Tok::Arrow, "'->' in share annotation");
    n.b = parse_expr();
    expect(Tok::RBrack, "']'");
  }

  SExprPtr parse_primary() {
    switch (peek().kind) {
      case Tok::Ident: {
        auto n = node(SurfaceExpr::Var);
        n->name = next().text;
        return n;
      }
      case Tok::Int: {
        auto n = node(SurfaceExpr::Int);
        n->value = next().value;
        return n;
      }
      case Tok::KwTrue: case Tok::KwFalse: {
        auto n = node(SurfaceExpr::Int);
        n->value = next().kind == Tok::KwTrue ? 1 : 0;
        return n;
      }
      case Tok::KwRead: {
        auto n = node(SurfaceExpr::ReadK);
        next();
        // optional inert metadata: read int from "file"
        size_t j = pos;
        while (toks[j].kind == Tok::Ident && toks[j].text != "from") j++;
        if (toks[j].kind == Tok::Ident && toks[j].text == "from" &&
            toks[j + 1].kind == Tok::String) {
          std::string meta;
          while (pos <= j + 1) { if (!meta.empty()) meta += " "; meta += next().text; }
          n->annotation = meta;
        }
        return n;
      }
      case Tok::LParen: {
        next();
        if (eat(Tok::RParen)) {  // unit -> 0
          auto n = node(SurfaceExpr::Int);
          n->value = 0;
          return n;
        }
        SExprPtr a = parse_expr();
        if (eat(Tok::Comma)) {
          auto n = std::make_shared<SurfaceExpr>();
          n->kind = SurfaceExpr::PairK;
          n->a = a;
          n->b = parse_expr();
          n->line = a->line;
          n->col = a->col;
          expect(Tok::RParen, "')'");
          return n;
        }
        expect(Tok::RParen, "')'");
        return a;
      }
      case Tok::LBrace: {
        auto n = node(SurfaceExpr::PSet);
        next();
        if (!eat(Tok::RBrace)) {
          n->members.push_back(expect(Tok::Ident, "party or pset variable").text);
          while (eat(Tok::Comma))
            n->members.push_back(expect(Tok::Ident, "party or pset variable").text);
          expect(Tok::RBrace, "'}'");
        }
        return n;
      }
      case Tok::LBrack: {
        auto n = node(SurfaceExpr::List);
        next();
        if (!eat(Tok::RBrack)) {
          n->items.push_back(parse_expr());
          while (eat(Tok::Comma)) n->items.push_back(parse_expr());
          expect(Tok::RBrack, "']'");
        }
        return n;
      }
      default:
        fail("expected expression");
    }
  }

  Program parse_program() {
    Program p;
    while (!at(Tok::End)) {
      if (eat(Tok::KwPrincipal)) {
        if (!at(Tok::Ident)) fail("expected principal name");
        while (at(Tok::Ident)) p.principals.push_back(next().text);
        continue;
      }
      if (at(Tok::KwDef)) {
        auto d = std::make_shared<SurfaceDef>();
        d->line = peek().line;
        d->col = peek().col;
        next();
        if (eat(Tok::KwBrec)) d->brec = true;
        d->name = expect(Tok::Ident, "definition name").text;
        while (!at(Tok::Eq)) {
          if (at(Tok::Ident)) {
            d->params.push_back({next().text});
          } else if (at(Tok::LParen)) {
            next();
            std::vector<std::string> tuple;
            if (!eat(Tok::RParen)) {
              tuple.push_back(expect(Tok::Ident, "parameter").text);
              while (eat(Tok::Comma))
                tuple.push_back(expect(Tok::Ident, "parameter").text);
              expect(Tok::RParen, "')'");
            }
            d->params.push_back(std::move(tuple));
          } else {
            fail("expected parameter or '='");
          }
        }
        expect(Tok::Eq, "'='");
        d->body = parse_expr();
        p.defs.push_back(std::move(d));
        continue;
      }
      fail("expected 'principal' or 'def'");
    }
    return p;
  }
};

}  // namespace

Program parse(const std::string &text) {
  Parser p;
  p.toks = lex(text);
  return p.parse_program();
}

}  // namespace lsym
