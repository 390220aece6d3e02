#include "apiguard/usage_lang.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "apiguard/errors.hpp"

namespace apiguard::lang {

namespace {

enum class TokKind { Ident, Keyword, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    Pos pos;
};

bool is_keyword(const std::string& s) {
    return s == "method" || s == "new" || s == "if" || s == "else" || s == "loop" ||
           s == "try" || s == "catch";
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skipTrivia();
        tok_.pos = {line_, col_};
        if (i_ >= src_.size()) {
            tok_.kind = TokKind::End;
            tok_.text = "end of input";
            return;
        }
        char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
                ident += src_[i_];
                bump();
            }
            tok_.kind = is_keyword(ident) ? TokKind::Keyword : TokKind::Ident;
            tok_.text = std::move(ident);
            return;
        }
        if (std::string("{}()=.,").find(c) != std::string::npos) {
            tok_.kind = TokKind::Punct;
            tok_.text = std::string(1, c);
            bump();
            return;
        }
        throw SyntaxError(line_, col_, "a token (unexpected character '" + std::string(1, c) + "')");
    }

    void skipTrivia() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
                while (i_ < src_.size() && src_[i_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    const std::string& src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

/// One binding per name (single assignment); type may be empty when the
/// statically known constructor type is unavailable.
struct Binding {
    std::string type;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    UsageProgram parseProgram() {
        UsageProgram prog;
        while (lex_.peek().kind != TokKind::End) {
            prog.methods.push_back(parseMethod());
        }
        for (std::size_t i = 0; i < prog.methods.size(); ++i)
            for (std::size_t j = i + 1; j < prog.methods.size(); ++j)
                if (prog.methods[i].name == prog.methods[j].name)
                    throw SyntaxError(prog.methods[j].pos.line, prog.methods[j].pos.column,
                                      "a unique method name ('" + prog.methods[j].name +
                                          "' already declared)");
        return prog;
    }

private:
    MethodDecl parseMethod() {
        expectKeyword("method");
        MethodDecl m;
        Token name = expectIdent("method name");
        m.name = name.text;
        m.pos = name.pos;
        scopes_.clear();
        scopes_.emplace_back();
        m.body = parseBlock();
        return m;
    }

    StmtList parseBlock() {
        expectPunct("{");
        scopes_.emplace_back();
        StmtList stmts;
        while (!(lex_.peek().kind == TokKind::Punct && lex_.peek().text == "}")) {
            if (lex_.peek().kind == TokKind::End)
                throw SyntaxError(lex_.peek().pos.line, lex_.peek().pos.column, "'}'");
            stmts.push_back(parseStmt());
        }
        lex_.take(); // '}'
        scopes_.pop_back();
        return stmts;
    }

    Stmt parseStmt() {
        const Token& t = lex_.peek();
        if (t.kind == TokKind::Keyword) {
            if (t.text == "if") return parseIf();
            if (t.text == "loop") return parseLoop();
            if (t.text == "try") return parseTry();
            throw SyntaxError(t.pos.line, t.pos.column, "a statement");
        }
        if (t.kind == TokKind::Ident) return parseIdentStmt();
        throw SyntaxError(t.pos.line, t.pos.column, "a statement");
    }

    Stmt parseIdentStmt() {
        Token first = lex_.take();
        const Token& next = lex_.peek();
        if (next.kind == TokKind::Punct && next.text == "=") {
            lex_.take();
            return parseAssignRhs(first);
        }
        if (next.kind == TokKind::Punct && next.text == ".") {
            lex_.take();
            Token member = expectIdent("member name after '.'");
            expectPunct("(");
            Stmt s;
            s.kind = StmtKind::Call;
            s.pos = first.pos;
            s.callStmt.receiver = first.text;
            s.callStmt.method = member.text;
            s.callStmt.args = parseArgs();
            checkReceiver(first);
            return s;
        }
        throw SyntaxError(next.pos.line, next.pos.column, "'=' or '.'");
    }

    Stmt parseAssignRhs(const Token& lhs) {
        checkFreshName(lhs);
        const Token& t = lex_.peek();
        if (t.kind == TokKind::Keyword && t.text == "new") {
            lex_.take();
            Token type = expectIdent("type name after 'new'");
            expectPunct("(");
            Stmt s;
            s.kind = StmtKind::New;
            s.pos = lhs.pos;
            s.newStmt.var = lhs.text;
            s.newStmt.type = type.text;
            s.newStmt.args = parseArgs();
            bind(lhs.text, type.text);
            return s;
        }
        Token recv = expectIdent("'new' or a receiver");
        expectPunct(".");
        Token member = expectIdent("member name after '.'");
        if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == "(") {
            lex_.take();
            Stmt s;
            s.kind = StmtKind::Call;
            s.pos = lhs.pos;
            s.callStmt.resultVar = lhs.text;
            s.callStmt.receiver = recv.text;
            s.callStmt.method = member.text;
            s.callStmt.args = parseArgsAfterOpen();
            bool staticCall = checkReceiver(recv);
            // factory convention: the result of a static call T.m() is typed T
            bind(lhs.text, staticCall ? recv.text : std::string());
            return s;
        }
        Stmt s;
        s.kind = StmtKind::FieldAccess;
        s.pos = lhs.pos;
        s.fieldStmt.resultVar = lhs.text;
        s.fieldStmt.receiver = recv.text;
        s.fieldStmt.field = member.text;
        checkReceiver(recv);
        bind(lhs.text, std::string());
        return s;
    }

    Stmt parseIf() {
        Token kw = lex_.take();
        Stmt s;
        s.kind = StmtKind::If;
        s.pos = kw.pos;
        s.ifStmt.thenBody = std::make_shared<StmtList>(parseBlock());
        if (lex_.peek().kind == TokKind::Keyword && lex_.peek().text == "else") {
            lex_.take();
            s.ifStmt.elseBody = std::make_shared<StmtList>(parseBlock());
        }
        return s;
    }

    Stmt parseLoop() {
        Token kw = lex_.take();
        Stmt s;
        s.kind = StmtKind::Loop;
        s.pos = kw.pos;
        s.loopStmt.body = std::make_shared<StmtList>(parseBlock());
        return s;
    }

    Stmt parseTry() {
        Token kw = lex_.take();
        Stmt s;
        s.kind = StmtKind::Try;
        s.pos = kw.pos;
        s.tryStmt.body = std::make_shared<StmtList>(parseBlock());
        if (!(lex_.peek().kind == TokKind::Keyword && lex_.peek().text == "catch"))
            throw SyntaxError(lex_.peek().pos.line, lex_.peek().pos.column, "'catch'");
        while (lex_.peek().kind == TokKind::Keyword && lex_.peek().text == "catch") {
            lex_.take();
            expectPunct("(");
            Token ex = expectIdent("exception type");
            expectPunct(")");
            Handler h;
            h.exceptionType = ex.text;
            h.body = std::make_shared<StmtList>(parseBlock());
            s.tryStmt.handlers.push_back(std::move(h));
        }
        return s;
    }

    std::vector<std::string> parseArgs() {
        // caller consumed '('
        return parseArgsAfterOpen();
    }

    std::vector<std::string> parseArgsAfterOpen() {
        std::vector<std::string> args;
        if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == ")") {
            lex_.take();
            return args;
        }
        for (;;) {
            Token a = expectIdent("argument name");
            args.push_back(a.text);
            const Token& t = lex_.peek();
            if (t.kind == TokKind::Punct && t.text == ",") {
                lex_.take();
                continue;
            }
            if (t.kind == TokKind::Punct && t.text == ")") {
                lex_.take();
                return args;
            }
            throw SyntaxError(t.pos.line, t.pos.column, "',' or ')'");
        }
    }

    Token expectIdent(const std::string& what) {
        const Token& t = lex_.peek();
        if (t.kind != TokKind::Ident) throw SyntaxError(t.pos.line, t.pos.column, what);
        return lex_.take();
    }

    void expectKeyword(const std::string& kw) {
        const Token& t = lex_.peek();
        if (t.kind != TokKind::Keyword || t.text != kw)
            throw SyntaxError(t.pos.line, t.pos.column, "'" + kw + "'");
        lex_.take();
    }

    void expectPunct(const std::string& p) {
        const Token& t = lex_.peek();
        if (t.kind != TokKind::Punct || t.text != p)
            throw SyntaxError(t.pos.line, t.pos.column, "'" + p + "'");
        lex_.take();
    }

    bool isBound(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->count(name)) return true;
        return false;
    }

    void checkFreshName(const Token& name) {
        if (isBound(name.text))
            throw SyntaxError(name.pos.line, name.pos.column,
                              "a fresh variable name (single assignment, '" + name.text +
                                  "' already bound)");
    }

    /// Returns true when the receiver resolves to a bare type name (static call).
    bool checkReceiver(const Token& recv) {
        if (isBound(recv.text)) return false;
        if (!recv.text.empty() && std::isupper(static_cast<unsigned char>(recv.text[0])))
            return true;
        throw UnboundVariable(recv.text, recv.pos.line);
    }

    void bind(const std::string& name, const std::string& type) {
        scopes_.back()[name] = Binding{type};
    }

    Lexer lex_;
    std::vector<std::map<std::string, Binding>> scopes_;
};

// ---------------------------------------------------------------------------
// renderer

void render_stmts(std::ostringstream& out, const StmtList& stmts, int indent);

void render_block(std::ostringstream& out, const StmtList& stmts, int indent) {
    out << "{\n";
    render_stmts(out, stmts, indent + 1);
    for (int i = 0; i < indent; ++i) out << "  ";
    out << "}";
}

void render_args(std::ostringstream& out, const std::vector<std::string>& args) {
    out << "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out << ", ";
        out << args[i];
    }
    out << ")";
}

void render_stmts(std::ostringstream& out, const StmtList& stmts, int indent) {
    for (const Stmt& s : stmts) {
        for (int i = 0; i < indent; ++i) out << "  ";
        switch (s.kind) {
        case StmtKind::New:
            out << s.newStmt.var << " = new " << s.newStmt.type;
            render_args(out, s.newStmt.args);
            break;
        case StmtKind::Call:
            if (s.callStmt.resultVar) out << *s.callStmt.resultVar << " = ";
            out << s.callStmt.receiver << "." << s.callStmt.method;
            render_args(out, s.callStmt.args);
            break;
        case StmtKind::FieldAccess:
            if (s.fieldStmt.resultVar) out << *s.fieldStmt.resultVar << " = ";
            out << s.fieldStmt.receiver << "." << s.fieldStmt.field;
            break;
        case StmtKind::If:
            out << "if ";
            render_block(out, *s.ifStmt.thenBody, indent);
            if (s.ifStmt.elseBody) {
                out << " else ";
                render_block(out, *s.ifStmt.elseBody, indent);
            }
            break;
        case StmtKind::Loop:
            out << "loop ";
            render_block(out, *s.loopStmt.body, indent);
            break;
        case StmtKind::Try:
            out << "try ";
            render_block(out, *s.tryStmt.body, indent);
            for (const Handler& h : s.tryStmt.handlers) {
                out << " catch (" << h.exceptionType << ") ";
                render_block(out, *h.body, indent);
            }
            break;
        }
        out << "\n";
    }
}

bool same_stmts(const StmtList& a, const StmtList& b);

bool same_stmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case StmtKind::New:
        return a.newStmt.var == b.newStmt.var && a.newStmt.type == b.newStmt.type &&
               a.newStmt.args == b.newStmt.args;
    case StmtKind::Call:
        return a.callStmt.resultVar == b.callStmt.resultVar &&
               a.callStmt.receiver == b.callStmt.receiver &&
               a.callStmt.method == b.callStmt.method && a.callStmt.args == b.callStmt.args;
    case StmtKind::FieldAccess:
        return a.fieldStmt.resultVar == b.fieldStmt.resultVar &&
               a.fieldStmt.receiver == b.fieldStmt.receiver &&
               a.fieldStmt.field == b.fieldStmt.field;
    case StmtKind::If: {
        if (!same_stmts(*a.ifStmt.thenBody, *b.ifStmt.thenBody)) return false;
        bool ae = a.ifStmt.elseBody != nullptr, be = b.ifStmt.elseBody != nullptr;
        if (ae != be) return false;
        return !ae || same_stmts(*a.ifStmt.elseBody, *b.ifStmt.elseBody);
    }
    case StmtKind::Loop:
        return same_stmts(*a.loopStmt.body, *b.loopStmt.body);
    case StmtKind::Try: {
        if (!same_stmts(*a.tryStmt.body, *b.tryStmt.body)) return false;
        if (a.tryStmt.handlers.size() != b.tryStmt.handlers.size()) return false;
        for (std::size_t i = 0; i < a.tryStmt.handlers.size(); ++i) {
            if (a.tryStmt.handlers[i].exceptionType != b.tryStmt.handlers[i].exceptionType)
                return false;
            if (!same_stmts(*a.tryStmt.handlers[i].body, *b.tryStmt.handlers[i].body)) return false;
        }
        return true;
    }
    }
    return false;
}

bool same_stmts(const StmtList& a, const StmtList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_stmt(a[i], b[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// groum construction

struct BuildCtx {
    Groum g;
    std::vector<std::map<std::string, std::pair<int, std::string>>> scopes; // var -> (node, type)

    int addNode(const std::string& label, NodeKind kind,
                std::optional<ControlKind> control = std::nullopt) {
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(Node{id, label, kind, control});
        return id;
    }

    void addEdge(int src, int dst, EdgeType type) {
        if (src == dst || g.hasEdge(src, dst, type)) return;
        g.edges.push_back(Edge{src, dst, type});
    }

    const std::pair<int, std::string>* lookup(const std::string& name) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return &found->second;
        }
        return nullptr;
    }
};

std::vector<int> actions_since(const BuildCtx& ctx, std::size_t firstNode) {
    std::vector<int> out;
    for (std::size_t i = firstNode; i < ctx.g.nodes.size(); ++i)
        if (ctx.g.nodes[i].kind == NodeKind::Action) out.push_back(ctx.g.nodes[i].id);
    return out;
}

struct ChainEnds {
    int entry = -1;
    int exit = -1;
    bool any() const { return entry >= 0; }
};

ChainEnds build_body(BuildCtx& ctx, const StmtList& stmts, bool inlineChain);

/// Builds one statement; returns its entry/exit nodes for Order chaining.
ChainEnds build_stmt(BuildCtx& ctx, const Stmt& s) {
    switch (s.kind) {
    case StmtKind::New: {
        int id = ctx.addNode(s.newStmt.type + ".<init>", NodeKind::Action);
        for (const std::string& arg : s.newStmt.args)
            if (const auto* b = ctx.lookup(arg)) ctx.addEdge(b->first, id, EdgeType::DataDep);
        ctx.scopes.back()[s.newStmt.var] = {id, s.newStmt.type};
        return {id, id};
    }
    case StmtKind::Call: {
        const auto* recv = ctx.lookup(s.callStmt.receiver);
        std::string type;
        bool staticCall = recv == nullptr;
        if (staticCall)
            type = s.callStmt.receiver;
        else
            type = recv->second.empty() ? "Unknown" : recv->second;
        int id = ctx.addNode(type + "." + s.callStmt.method, NodeKind::Action);
        if (recv) ctx.addEdge(recv->first, id, EdgeType::DataDep);
        for (const std::string& arg : s.callStmt.args)
            if (const auto* b = ctx.lookup(arg)) ctx.addEdge(b->first, id, EdgeType::DataDep);
        if (s.callStmt.resultVar)
            ctx.scopes.back()[*s.callStmt.resultVar] = {id, staticCall ? type : std::string()};
        return {id, id};
    }
    case StmtKind::FieldAccess: {
        const auto* recv = ctx.lookup(s.fieldStmt.receiver);
        std::string type = recv ? (recv->second.empty() ? "Unknown" : recv->second)
                                : s.fieldStmt.receiver;
        int id = ctx.addNode(type + "." + s.fieldStmt.field, NodeKind::Action);
        if (recv) ctx.addEdge(recv->first, id, EdgeType::DataDep);
        if (s.fieldStmt.resultVar) ctx.scopes.back()[*s.fieldStmt.resultVar] = {id, std::string()};
        return {id, id};
    }
    case StmtKind::If: {
        int ifNode = ctx.addNode("IF", NodeKind::Control, ControlKind::If);
        std::size_t first = ctx.g.nodes.size();
        build_body(ctx, *s.ifStmt.thenBody, false);
        if (s.ifStmt.elseBody) build_body(ctx, *s.ifStmt.elseBody, false);
        ctx.g.regions[ifNode] = actions_since(ctx, first);
        return {ifNode, ifNode};
    }
    case StmtKind::Loop: {
        int loopNode = ctx.addNode("LOOP", NodeKind::Control, ControlKind::Loop);
        std::size_t first = ctx.g.nodes.size();
        build_body(ctx, *s.loopStmt.body, false);
        std::vector<int> actions = actions_since(ctx, first);
        for (int a : actions) ctx.addEdge(loopNode, a, EdgeType::LoopInclusion);
        ctx.g.regions[loopNode] = std::move(actions);
        return {loopNode, loopNode};
    }
    case StmtKind::Try: {
        // try body is straight-line code: inline it in the enclosing sequence
        std::size_t firstTry = ctx.g.nodes.size();
        ChainEnds body = build_body(ctx, *s.tryStmt.body, true);
        std::vector<int> guarded = actions_since(ctx, firstTry);
        int prevCatch = body.any() ? body.exit : -1;
        int entry = body.any() ? body.entry : -1;
        for (const Handler& h : s.tryStmt.handlers) {
            int catchNode = ctx.addNode(h.exceptionType, NodeKind::Control, ControlKind::Catch);
            for (int a : guarded) ctx.addEdge(catchNode, a, EdgeType::ExceptionScope);
            if (prevCatch >= 0) ctx.addEdge(prevCatch, catchNode, EdgeType::Order);
            if (entry < 0) entry = catchNode;
            prevCatch = catchNode;
            std::size_t firstHandler = ctx.g.nodes.size();
            build_body(ctx, *h.body, false);
            ctx.g.regions[catchNode] = actions_since(ctx, firstHandler);
        }
        return {entry, prevCatch};
    }
    }
    return {};
}

/// Chains the statements of one body with Order edges. Branch bodies
/// (inlineChain == false) are ordered internally only; the enclosing
/// sequence resumes from the control node.
ChainEnds build_body(BuildCtx& ctx, const StmtList& stmts, bool inlineChain) {
    (void)inlineChain;
    ctx.scopes.emplace_back();
    ChainEnds ends;
    for (const Stmt& s : stmts) {
        ChainEnds cur = build_stmt(ctx, s);
        if (!cur.any()) continue;
        if (ends.any()) ctx.addEdge(ends.exit, cur.entry, EdgeType::Order);
        if (!ends.any()) ends.entry = cur.entry;
        ends.exit = cur.exit;
    }
    ctx.scopes.pop_back();
    return ends;
}

} // namespace

UsageProgram parse(const std::string& source) {
    return Parser(source).parseProgram();
}

std::string render(const UsageProgram& program) {
    std::ostringstream out;
    for (const MethodDecl& m : program.methods) {
        out << "method " << m.name << " ";
        render_block(out, m.body, 0);
        out << "\n";
    }
    return out.str();
}

bool same_structure(const UsageProgram& a, const UsageProgram& b) {
    if (a.methods.size() != b.methods.size()) return false;
    for (std::size_t i = 0; i < a.methods.size(); ++i) {
        if (a.methods[i].name != b.methods[i].name) return false;
        if (!same_stmts(a.methods[i].body, b.methods[i].body)) return false;
    }
    return true;
}

Groum build_groum(const MethodDecl& method) {
    BuildCtx ctx;
    build_body(ctx, method.body, true);
    ctx.g.canonicalize();
    ctx.g.validate();
    return ctx.g;
}

} // namespace apiguard::lang
