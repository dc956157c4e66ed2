// Command-line driver for key generation, signing, encryption, the attack
// procedures and the solving-degree probe.
//
// Exit codes: 0 success / valid; 1 verification failure or no solution;
// 2 usage or malformed-input error; 3 budget or internal error.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "pesto/attacks.hpp"
#include "pesto/codec.hpp"
#include "pesto/solvedeg.hpp"
#include "pesto/toy.hpp"

using namespace pesto;
using nlohmann::json;

namespace {

struct ExitCode {
    int code;
};

FieldRef parse_field(const std::string& tok) {
    const auto caret = tok.find('^');
    if (caret != std::string::npos) {
        const unsigned long base = std::stoul(tok.substr(0, caret));
        const unsigned long exp = std::stoul(tok.substr(caret + 1));
        if (base == 2) return FieldSpec::binary(std::uint32_t(exp));
        if (exp == 1) return FieldSpec::prime(std::uint32_t(base));
        throw CLI::ValidationError("--params", "only prime fields and GF(2^k) are supported");
    }
    const unsigned long q = std::stoul(tok);
    if ((q & (q - 1)) == 0 && q > 2) {
        std::uint32_t k = 0;
        for (unsigned long v = q; v > 1; v >>= 1) ++k;
        return FieldSpec::binary(k);
    }
    return FieldSpec::prime(std::uint32_t(q));
}

PestoParams parse_params(const std::string& spec) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : spec) {
        if (ch == ',') {
            toks.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    toks.push_back(cur);
    if (toks.size() != 5)
        throw CLI::ValidationError("--params", "expected q,n,m,t,s (e.g. 2^6,27,25,10,2)");
    return PestoParams(parse_field(toks[0]), std::uint32_t(std::stoul(toks[1])),
                       std::uint32_t(std::stoul(toks[2])), std::uint32_t(std::stoul(toks[3])),
                       std::uint32_t(std::stoul(toks[4])));
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError(path, "cannot open file");
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const Bytes& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CLI::ValidationError(path, "cannot open file for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (std::uint64_t(rd()) << 32) | rd();
}

json report_to_json(const AttackReport& r) {
    json j;
    j["attack"] = r.attack;
    j["success"] = r.success;
    j["wall_ms"] = r.wall_ms;
    j["stats"] = r.stats;
    j["notes"] = r.notes;
    j["candidates"] = r.candidates;
    return j;
}

void emit_report(const AttackReport& r, const std::string& json_path) {
    std::cout << r.to_text();
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::trunc);
        if (!out) throw CLI::ValidationError(json_path, "cannot open file for writing");
        out << report_to_json(r).dump(2) << "\n";
    }
}

int run_toy() {
    auto kp = toy::keypair();
    const FieldRef f = kp.sk.params.field;
    PolySystem g = build_twisted(kp.sk.central);
    PolySystem want = toy::expected_g(f);
    std::size_t matched = 0, total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        total += want.polys[i].terms().size();
        if (g.polys[i].terms() == want.polys[i].terms()) matched += want.polys[i].terms().size();
    }
    std::cout << "fixture field: GF(5), params (n,m,t,s) = (5,4,2,1)\n";
    std::cout << "twisted-system coefficients matched: " << matched << "/" << total << "\n";
    if (matched != total) return 1;
    Rng rng(1);
    FVec w = random_vector(4, *f, rng);
    FVec sig = sign(kp.sk, w, rng);
    const bool sig_ok = verify(kp.pk, w, sig);
    std::cout << "sign/verify roundtrip: " << (sig_ok ? "ok" : "FAILED") << "\n";
    FVec z = random_vector(5, *f, rng);
    FVec ct = encrypt(kp.pk, z);
    auto pre = decrypt(kp.sk, ct);
    bool dec_ok = false;
    for (const auto& p : pre) dec_ok = dec_ok || p == z;
    std::cout << "encrypt/decrypt roundtrip: " << (dec_ok ? "ok" : "FAILED") << " ("
              << pre.size() << " preimages)\n";
    return sig_ok && dec_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multivariate oil-and-vinegar signature/encryption toolkit"};
    app.require_subcommand(1);

    std::string params_spec, sk_path, pk_path, in_path, out_path, sig_path, target_path;
    std::string out_dir = ".", json_path, csv_path;
    std::uint64_t seed = 0;
    bool have_seed = false, reduced = true, packed = false;
    unsigned trials = 1, d_max = 9;
    std::size_t sample_budget = 0;

    auto* keygen_cmd = app.add_subcommand("keygen", "generate a key pair");
    keygen_cmd->add_option("--params", params_spec, "q,n,m,t,s")->required();
    keygen_cmd->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });
    keygen_cmd->add_flag("--reduced-a1,!--no-reduced-a1", reduced,
                         "quadratic-head output transformation (default on)");
    keygen_cmd->add_flag("--packed", packed, "bit-packed coefficient streams");
    keygen_cmd->add_option("--out-dir", out_dir);

    auto* sign_cmd = app.add_subcommand("sign", "sign a digest file");
    sign_cmd->add_option("--sk", sk_path)->required();
    sign_cmd->add_option("--in", in_path, "digest file (length-prefixed element vector)")->required();
    sign_cmd->add_option("--out", out_path)->required();
    sign_cmd->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });

    auto* verify_cmd = app.add_subcommand("verify", "verify a signature");
    verify_cmd->add_option("--pk", pk_path)->required();
    verify_cmd->add_option("--in", in_path)->required();
    verify_cmd->add_option("--sig", sig_path)->required();

    auto* encrypt_cmd = app.add_subcommand("encrypt", "evaluate the public map on a plaintext");
    encrypt_cmd->add_option("--pk", pk_path)->required();
    encrypt_cmd->add_option("--in", in_path)->required();
    encrypt_cmd->add_option("--out", out_path)->required();

    auto* decrypt_cmd = app.add_subcommand("decrypt", "recover preimages of a ciphertext");
    decrypt_cmd->add_option("--sk", sk_path)->required();
    decrypt_cmd->add_option("--in", in_path)->required();
    decrypt_cmd->add_option("--out", out_path)->required();

    auto* keysize_cmd = app.add_subcommand("keysize", "serialized coefficient counts");
    keysize_cmd->add_option("--params", params_spec)->required();
    bool keysize_reduced = false;
    keysize_cmd->add_flag("--reduced", keysize_reduced);
    keysize_cmd->add_flag("--packed", packed, "also print packed byte sizes");

    auto* cost_cmd = app.add_subcommand("cost", "field-multiplication counts");
    cost_cmd->add_option("--params", params_spec)->required();

    auto* attack_cmd = app.add_subcommand("attack", "structural attack procedures");
    attack_cmd->require_subcommand(1);
    auto* iso_cmd = attack_cmd->add_subcommand("iso-quad", "isolate quadratic components");
    iso_cmd->add_option("--pk", pk_path)->required();
    iso_cmd->add_option("--json", json_path);
    auto* lin_cmd = attack_cmd->add_subcommand("lin-struct", "common linear structures");
    lin_cmd->add_option("--pk", pk_path)->required();
    lin_cmd->add_option("--json", json_path);
    auto* zle_cmd = attack_cmd->add_subcommand("linearize", "bilinear-relation forgery");
    zle_cmd->add_option("--pk", pk_path)->required();
    zle_cmd->add_option("--target", target_path, "target digest file")->required();
    zle_cmd->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });
    zle_cmd->add_option("--samples", sample_budget);
    zle_cmd->add_option("--json", json_path);
    auto* ka2_cmd = attack_cmd->add_subcommand("known-a2", "forgery given the input transformation");
    ka2_cmd->add_option("--pk", pk_path)->required();
    ka2_cmd->add_option("--sk", sk_path, "secret key supplying the known input transformation")
        ->required();
    ka2_cmd->add_option("--target", target_path)->required();
    ka2_cmd->add_option("--json", json_path);

    auto* sd_cmd = app.add_subcommand("solvedeg", "XL witness-degree probe (CSV on stdout)");
    sd_cmd->add_option("--params", params_spec)->required();
    sd_cmd->add_option("--trials", trials);
    sd_cmd->add_option("--seed", seed, "first seed (trials use seed, seed+1, ...)")
        ->each([&](const std::string&) { have_seed = true; });
    sd_cmd->add_option("--d-max", d_max);
    sd_cmd->add_option("--csv", csv_path, "also write the CSV to this file");

    auto* toy_cmd = app.add_subcommand("toy", "run the GF(5) fixture end to end");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help exits 0; any parse failure is a usage error
    }

    try {
        if (*keygen_cmd) {
            PestoParams p = parse_params(params_spec);
            if (!have_seed) seed = fresh_seed();
            Rng rng(seed);
            auto kp = keygen(p, rng, reduced);
            std::filesystem::create_directories(out_dir);
            const std::string pk_file = out_dir + "/pk.key", sk_file = out_dir + "/sk.key";
            write_file(pk_file, encode_key(kp.pk, packed));
            write_file(sk_file, encode_key(kp.sk, packed));
            std::cout << "seed=" << seed << "\n"
                      << "pk=" << pk_file << " (" << std::filesystem::file_size(pk_file)
                      << " bytes)\n"
                      << "sk=" << sk_file << " (" << std::filesystem::file_size(sk_file)
                      << " bytes)\n";
        } else if (*sign_cmd) {
            PestoSecretKey sk = decode_secret_key(read_file(sk_path));
            FVec w = decode_vector(read_file(in_path), *sk.params.field);
            if (!have_seed) seed = fresh_seed();
            Rng rng(seed);
            FVec sig = sign(sk, w, rng);
            write_file(out_path, encode_vector(sig, *sk.params.field));
            std::cout << "seed=" << seed << "\nsignature written to " << out_path << "\n";
        } else if (*verify_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            FVec w = decode_vector(read_file(in_path), *pk.params.field);
            FVec sig = decode_vector(read_file(sig_path), *pk.params.field);
            const bool ok = verify(pk, w, sig);
            std::cout << (ok ? "valid" : "invalid") << "\n";
            return ok ? 0 : 1;
        } else if (*encrypt_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            FVec z = decode_vector(read_file(in_path), *pk.params.field);
            write_file(out_path, encode_vector(encrypt(pk, z), *pk.params.field));
        } else if (*decrypt_cmd) {
            PestoSecretKey sk = decode_secret_key(read_file(sk_path));
            FVec ct = decode_vector(read_file(in_path), *sk.params.field);
            auto pre = decrypt(sk, ct);
            std::cout << "preimages=" << pre.size() << "\n";
            if (pre.empty()) return 1;
            write_file(out_path, encode_vector(pre.front(), *sk.params.field));
        } else if (*keysize_cmd) {
            PestoParams p = parse_params(params_spec);
            auto [pk_count, sk_count] = key_counts(p, keysize_reduced);
            std::cout << "sk=" << sk_count << " pk=" << pk_count << "\n";
            if (packed)
                std::cout << "packed bytes: sk="
                          << encoded_key_size(p, true, keysize_reduced, true) - 24
                          << " pk=" << encoded_key_size(p, false, keysize_reduced, true) - 24
                          << "\n";
        } else if (*cost_cmd) {
            PestoParams p = parse_params(params_spec);
            auto [ver, sig] = mult_cost(p);
            std::cout << "verify_mults=" << ver << " sign_mults=" << sig << "\n";
        } else if (*iso_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            detail::StopWatch watch;
            auto cs = isolate_quadratic(pk);
            AttackReport r;
            r.attack = "isolate-quadratic";
            r.success = cs.dimension() >= pk.params.t;
            r.wall_ms = watch.ms();
            r.stats["dimension"] = cs.dimension();
            r.stats["t"] = pk.params.t;
            for (const auto& v : cs.basis) r.candidates.push_back(v);
            emit_report(r, json_path);
        } else if (*lin_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            detail::StopWatch watch;
            auto cs = isolate_quadratic(pk);
            std::vector<Poly> comps;
            for (const auto& lambda : cs.basis) comps.push_back(component(lambda, pk.g_pub));
            auto V = common_linear_structures(comps);
            AttackReport r;
            r.attack = "common-linear-structures";
            r.success = V.dimension() >= pk.params.t;
            r.wall_ms = watch.ms();
            r.stats["component_dimension"] = cs.dimension();
            r.stats["structure_dimension"] = V.dimension();
            r.stats["t"] = pk.params.t;
            for (const auto& v : V.basis) r.candidates.push_back(v);
            emit_report(r, json_path);
        } else if (*zle_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            FVec target = decode_vector(read_file(target_path), *pk.params.field);
            if (!have_seed) seed = fresh_seed();
            Rng rng(seed);
            AttackReport r = linearization_attack(pk, target, rng, sample_budget);
            emit_report(r, json_path);
            return r.success ? 0 : 1;
        } else if (*ka2_cmd) {
            PestoPublicKey pk = decode_public_key(read_file(pk_path));
            PestoSecretKey sk = decode_secret_key(read_file(sk_path));
            FVec target = decode_vector(read_file(target_path), *pk.params.field);
            detail::StopWatch watch;
            AttackReport r;
            r.attack = "known-input-transformation";
            try {
                FVec pre = forge_with_known_a2(pk, sk.a2, target);
                r.success = pk.g_pub.eval(pre) == target;
                r.candidates.push_back(std::move(pre));
            } catch (const Error& e) {
                r.notes.push_back(e.what());
            }
            r.wall_ms = watch.ms();
            emit_report(r, json_path);
            return r.success ? 0 : 1;
        } else if (*sd_cmd) {
            PestoParams p = parse_params(params_spec);
            if (!have_seed) seed = 1;
            std::ofstream csv;
            if (!csv_path.empty()) {
                csv.open(csv_path, std::ios::trunc);
                if (!csv) throw CLI::ValidationError(csv_path, "cannot open file for writing");
            }
            std::cout << probe_csv_header() << "\n";
            if (csv) csv << probe_csv_header() << "\n";
            for (unsigned i = 0; i < trials; ++i) {
                ProbeRecord rec = probe_witness_degree(p, seed + i, d_max);
                std::cout << to_csv(rec) << "\n";
                if (csv) csv << to_csv(rec) << "\n";
            }
        } else if (*toy_cmd) {
            return run_toy();
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NoSolutionFound& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const SigningFailed& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const CodecError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ParamRange& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "malformed numeric argument: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 0;
}
