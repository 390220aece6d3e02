#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apiguard/groum.hpp"

namespace apiguard::lang {

/// AST for the `.usage` DSL.
///
/// Grammar:
///   program    := methodDecl*
///   methodDecl := "method" IDENT "{" stmt* "}"
///   stmt       := assign | call | ctrl
///   assign     := IDENT "=" (newExpr | callExpr | fieldExpr)
///   newExpr    := "new" IDENT "(" argList? ")"
///   callExpr   := IDENT "." IDENT "(" argList? ")"
///   fieldExpr  := IDENT "." IDENT
///   ctrl       := "if" block ("else" block)?
///              | "loop" block
///              | "try" block ("catch" "(" IDENT ")" block)+
///   block      := "{" stmt* "}"
///   argList    := IDENT ("," IDENT)*
/// `//` starts a line comment.

struct Pos {
    int line = 1;
    int column = 1;
    bool operator==(const Pos&) const = default;
};

struct Stmt;
using StmtList = std::vector<Stmt>;

struct NewStmt {
    std::string var;
    std::string type;
    std::vector<std::string> args;
};

struct CallStmt {
    std::optional<std::string> resultVar;
    std::string receiver; // bound variable or bare type name
    std::string method;
    std::vector<std::string> args;
};

struct FieldAccessStmt {
    std::optional<std::string> resultVar;
    std::string receiver;
    std::string field;
};

struct IfStmt {
    std::shared_ptr<StmtList> thenBody;
    std::shared_ptr<StmtList> elseBody; // null when no else clause
};

struct LoopStmt {
    std::shared_ptr<StmtList> body;
};

struct Handler {
    std::string exceptionType;
    std::shared_ptr<StmtList> body;
};

struct TryStmt {
    std::shared_ptr<StmtList> body;
    std::vector<Handler> handlers;
};

enum class StmtKind { New, Call, FieldAccess, If, Loop, Try };

struct Stmt {
    StmtKind kind;
    Pos pos;
    // exactly one of these is meaningful, per kind
    NewStmt newStmt;
    CallStmt callStmt;
    FieldAccessStmt fieldStmt;
    IfStmt ifStmt;
    LoopStmt loopStmt;
    TryStmt tryStmt;
};

struct MethodDecl {
    std::string name;
    Pos pos;
    StmtList body;
};

struct UsageProgram {
    std::vector<MethodDecl> methods;
};

/// Recursive-descent parse of a `.usage` source.
/// Throws SyntaxError on grammar violations, UnboundVariable when a
/// lowercase identifier is used as a receiver before being bound.
UsageProgram parse(const std::string& source);

/// Canonical renderer; parse(render(ast)) reproduces the AST structure.
std::string render(const UsageProgram& program);

/// Structural equality ignoring source positions.
bool same_structure(const UsageProgram& a, const UsageProgram& b);

/// Builds the initial (unpruned) groum of one method.
Groum build_groum(const MethodDecl& method);

} // namespace apiguard::lang
