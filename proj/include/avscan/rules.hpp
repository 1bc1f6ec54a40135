#pragma once

#include "avscan/ast.hpp"
#include "avscan/avs.hpp"
#include "avscan/cfg.hpp"
#include "avscan/matcher.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace avscan {

enum class RuleId {
    UnexpectedRevert,
    ReentrancySlither,
    TxOriginSlither,
    TxOriginSmartCheck,
    UncheckedLLC,
    Selfdestruct
};
std::string_view to_string(RuleId r);

enum class DmId { DM1 = 1, DM2, DM3, DM4, DM5, DM6, DM7, DM8, DM9, DM10 };
std::string to_string(DmId d);
std::optional<DmId> dm_from_string(std::string_view s);
/// Defense mechanisms consulted for each vulnerability type.
std::vector<DmId> wired_dms(VulnType t);

enum class FindingSource { Rule, Avs, Both };
std::string_view to_string(FindingSource s);

struct Finding {
    VulnType vuln_type = VulnType::Reentrancy;
    std::string contract;
    std::string function;
    std::vector<ast::Span> spans;
    FindingSource source = FindingSource::Rule;
    std::optional<RuleId> fired_rule;
    std::optional<std::string> matched_avs;
    std::vector<DmId> suppressed_by;

    bool reported() const { return suppressed_by.empty(); }
};

/// Something that happens while a function runs, in evaluation order.
struct Event {
    enum class Kind {
        StateRead,
        StateWrite,
        Assign,        // any assignment; expr is the Assign node
        Decl,          // local declaration; expr is the VarDecl node
        ExternCall,    // money-transfer external call that can re-enter
        MoneySend,     // transfer / send / .value()()
        LowLevelCall,  // send / call / callcode / delegatecall
        Selfdestruct,
        TxOrigin,
        IdentityCheck, // msg.sender compared with an owner-like state variable
        LockCheck,     // condition requiring a bool state variable to be false
        CondUse        // identifier read inside a condition
    };
    Kind kind;
    std::string var;                    // state variable / local name where relevant
    ast::Node const* expr = nullptr;
    std::size_t node = 0;               // CFG node
    std::size_t seq = 0;                // evaluation index within the node
    ast::Span span;                     // statement (or condition) span
    bool in_condition = false;          // if/loop condition
    bool in_check = false;              // require/assert argument
    bool condition_reverts = false;     // owning if-statement has a revert/throw branch
    bool in_loop = false;
    bool param_keyed = false;           // state write indexed by a function parameter
    bool checked = false;               // low-level call whose result is tested
};

class FunctionAnalysis {
public:
    FunctionAnalysis(ast::SourceUnit const& unit, ast::ContractDef const& contract, ast::FunctionDef const& fn);

    ast::SourceUnit const& unit() const { return unit_; }
    ast::ContractDef const& contract() const { return contract_; }
    ast::FunctionDef const& function() const { return fn_; }
    Cfg const& cfg() const { return cfg_; }
    std::vector<Event> const& events() const { return events_; }

    /// a happens before b along some loop-free path.
    bool precedes(Event const& a, Event const& b) const;
    bool dominates(Event const& a, Event const& b) const;
    bool is_owner_like(std::string const& state_var) const;
    bool is_param(std::string const& name) const;
    /// True when the expression's receiver resolves to a hard-coded address.
    bool hardcoded_address(ast::Node const& expr) const;
    /// Locals whose every binding is msg.sender.
    bool bound_to_sender(std::string const& local) const;
    std::vector<ast::ModifierDef const*> applied_modifiers() const;

private:
    void collect();

    ast::SourceUnit const& unit_;
    ast::ContractDef const& contract_;
    ast::FunctionDef const& fn_;
    Cfg cfg_;
    std::vector<std::size_t> idom_;
    std::vector<std::vector<bool>> reach_;
    std::vector<Event> events_;
    std::set<std::string> owner_like_;
};

/// Modifier body compares msg.sender and reverts (or gates `_`) on failure.
bool modifier_has_identity_check(ast::ModifierDef const& m);

struct Candidate {
    VulnType vuln_type = VulnType::Reentrancy;
    std::optional<RuleId> rule;
    std::string avs_id;
    std::vector<ast::Span> spans;
    std::optional<std::size_t> anchor;  // index into FunctionAnalysis::events()
    std::set<std::string> vars;         // state variables the rule fired on
};

std::vector<Candidate> rule_unexpected_revert(FunctionAnalysis const& fa);
std::vector<Candidate> rule_reentrancy(FunctionAnalysis const& fa);
std::vector<Candidate> rule_tx_origin(FunctionAnalysis const& fa, bool include_modifiers = true);
std::vector<Candidate> rule_unchecked_llc(FunctionAnalysis const& fa);
std::vector<Candidate> rule_selfdestruct(FunctionAnalysis const& fa);

bool dm_holds(DmId dm, Candidate const& c, FunctionAnalysis const& fa);

struct ScanConfig {
    MatchConfig match;
    bool use_rules = true;
    bool use_avs = true;
    std::set<DmId> disabled_dms;
    bool tx_origin_modifiers = true;  // SmartCheck variant; false = function bodies only

    nlohmann::json to_json() const;
};

Finding apply_dms(Candidate const& c, FunctionAnalysis const& fa, ScanConfig const& cfg);

/// Signature keys are computed once per store.
struct PreparedStore {
    std::vector<AvsSignature> const* avs = nullptr;
    std::vector<std::vector<std::string>> keys;
};
PreparedStore prepare_store(std::vector<AvsSignature> const& store);

std::vector<Candidate> scan_with_avs(PreparedStore const& store, FunctionAnalysis const& fa, MatchConfig const& cfg,
                                     std::vector<std::string>* warnings = nullptr);

struct FileReport {
    std::string path;
    std::vector<Finding> findings;
    std::vector<std::string> warnings;
};

FileReport scan_unit(ast::SourceUnit const& unit, PreparedStore const& store, ScanConfig const& cfg);

struct Report {
    std::string tool_version;
    nlohmann::json config;
    std::vector<FileReport> files;

    std::size_t reported_count() const;
    std::size_t suppressed_count() const;
};

nlohmann::json to_json(Finding const& f);
nlohmann::json to_json(Report const& r);
std::string to_text(Report const& r);

}  // namespace avscan
