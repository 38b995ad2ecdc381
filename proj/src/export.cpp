#include "shlide/frontend.hpp"

#include <sstream>

namespace shlide {

namespace {

std::string closing(const ProofNode& n) {
    switch (n.status) {
        case NodeStatus::Valid: return n.axiom.empty() ? "" : " [" + n.axiom + "]";
        case NodeStatus::Invalid: return " [INVALID " + n.invalid_case + "]";
        case NodeStatus::Open: return n.children.empty() ? " [OPEN]" : "";
        case NodeStatus::Bud: return "";
    }
    return "";
}

void text_node(const ProofTree& t, int id, int depth, std::ostringstream& os) {
    const ProofNode& n = t.node(id);
    os << std::string(static_cast<size_t>(depth) * 2, ' ') << "#" << n.id << " " << to_string(n.ent);
    if (!n.children.empty()) os << " [" << n.rule << "]";
    os << closing(n);
    if (n.status == NodeStatus::Bud) os << " ~~> companion#" << n.companion << " via " << to_string(n.sigma);
    os << "\n";
    for (int c : n.children) text_node(t, c, depth + 1, os);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string to_dot(const ProofTree& t) {
    std::ostringstream os;
    os << "digraph proof {\n  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& n : t.nodes) {
        std::string label = "#" + std::to_string(n.id) + "  " + to_string(n.ent) + closing(n);
        os << "  n" << n.id << " [label=\"" << dot_escape(label) << "\"";
        if (n.status == NodeStatus::Invalid) os << ", color=red";
        if (n.status == NodeStatus::Bud) os << ", style=rounded";
        os << "];\n";
    }
    for (const auto& n : t.nodes)
        for (int c : n.children) os << "  n" << n.id << " -> n" << c << " [label=\"" << dot_escape(n.rule) << "\"];\n";
    for (const auto& b : t.backlinks)
        os << "  n" << b.bud << " -> n" << b.companion << " [style=dashed, label=\"" << dot_escape(to_string(b.sigma))
           << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace

std::string export_proof(const ProofTree& t, const std::string& format) {
    if (format == "dot") return to_dot(t);
    if (format != "text") throw std::invalid_argument("unknown proof format " + format);
    std::ostringstream os;
    if (!t.nodes.empty()) text_node(t, t.root, 0, os);
    return os.str();
}

}  // namespace shlide
