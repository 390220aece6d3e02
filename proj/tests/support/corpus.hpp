#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "apiguard/api_spec.hpp"
#include "apiguard/errors.hpp"
#include "apiguard/eval.hpp"
#include "apiguard/rng.hpp"
#include "apiguard/signature.hpp"
#include "apiguard/usage_lang.hpp"

namespace apiguard::testsupport {

/// A six-method Session API with an open-use-close protocol:
/// <init>, read, write, commit, rollback, close. Clients come in four
/// usage families (reader, writer, transactional, exception-guarded) with
/// size variation, plus non-API noise statements that pruning must drop.
inline std::string session_client_dsl(int index, Rng& rng) {
    std::ostringstream out;
    int family = index % 4;
    int reps = 1 + static_cast<int>(rng.nextIndex(3));
    out << "method client" << index << " {\n";
    out << "  s = new Session(cfg)\n";
    out << "  b = new Buffer()\n"; // non-API local
    switch (family) {
    case 0: // reader
        out << "  loop {\n";
        for (int i = 0; i < reps; ++i) out << "    x" << i << " = s.read()\n";
        out << "  }\n";
        out << "  b.append(x0)\n";
        break;
    case 1: // writer
        out << "  loop {\n";
        for (int i = 0; i < reps; ++i) out << "    s.write(cfg)\n";
        out << "  }\n";
        out << "  s.commit()\n";
        break;
    case 2: // transactional
        out << "  y = s.read()\n";
        for (int i = 0; i < reps; ++i) out << "  s.write(y)\n";
        out << "  if {\n    s.commit()\n  } else {\n    s.rollback()\n  }\n";
        break;
    default: // exception-guarded
        out << "  try {\n    loop {\n      z = s.read()\n    }\n";
        for (int i = 0; i < reps; ++i) out << "    s.write(z)\n";
        out << "  } catch (IoError) {\n    s.rollback()\n  }\n";
        break;
    }
    out << "  s.close()\n";
    out << "}\n";
    return out.str();
}

inline ApiSpec session_api() {
    ApiSpec api;
    api.name = "session";
    api.types = {"Session"};
    return api;
}

inline SelfCorpus make_session_corpus(int clients = 60, std::uint64_t seed = 1) {
    Rng rng(seed);
    std::ostringstream dsl;
    for (int i = 0; i < clients; ++i) dsl << session_client_dsl(i, rng);
    lang::UsageProgram program = lang::parse(dsl.str());
    SelfCorpus corpus;
    corpus.api = session_api();
    for (const lang::MethodDecl& m : program.methods)
        corpus.signatures.push_back(
            extract_signature(lang::build_groum(m), corpus.api, m.name));
    return corpus;
}

/// Goods plus one injected misuse per good, cycling over the kinds that
/// apply to each signature.
inline std::vector<LabeledCase> make_labeled_cases(const SelfCorpus& corpus, std::uint64_t seed,
                                                   bool includeSwappedOrder = false) {
    std::vector<LabeledCase> cases;
    for (const UsageSignature& sig : corpus.signatures)
        cases.push_back(LabeledCase{sig, CaseLabel::GoodUse, std::nullopt});
    std::vector<MisuseKind> kinds = {MisuseKind::MissingCall, MisuseKind::MissingExceptionHandling,
                                     MisuseKind::MissingConditionOrState};
    if (includeSwappedOrder) kinds.push_back(MisuseKind::SwappedOrder);
    Rng rng = Rng(seed).split(7);
    for (std::size_t i = 0; i < corpus.signatures.size(); ++i) {
        for (std::size_t offset = 0; offset < kinds.size(); ++offset) {
            try {
                cases.push_back(
                    inject_misuse(corpus.signatures[i], kinds[(i + offset) % kinds.size()], rng));
                break;
            } catch (const Inapplicable&) {
            }
        }
    }
    return cases;
}

} // namespace apiguard::testsupport
