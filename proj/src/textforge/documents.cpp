#include "climagent/textforge/documents.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"

namespace climagent::textforge {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(b, e - b + 1));
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
        } else {
            if (space) out.push_back(' ');
            space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::size_t n = 0;
    std::string w;
    while (in >> w) ++n;
    return n;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_entities(std::string_view s) {
    static const std::map<std::string, std::string, std::less<>> named{
        {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "},
        {"ndash", "-"}, {"mdash", "-"}, {"deg", "\xC2\xB0"}, {"micro", "\xC2\xB5"}, {"sup3", "\xC2\xB3"}};
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        auto name = s.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            try {
                unsigned long cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                                       ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                                       : std::stoul(std::string(name.substr(1)));
                append_utf8(out, cp == 0xA0 ? 0x20 : cp);
                i = semi;
                continue;
            } catch (const std::exception&) {
            }
        } else if (auto it = named.find(name); it != named.end()) {
            out += it->second;
            i = semi;
            continue;
        }
        out.push_back('&');
    }
    return out;
}

// ---- html ----

struct Tag {
    std::string name;  // lowercased, no '/'
    bool closing = false;
    std::map<std::string, std::string> attrs;
};

Tag parse_tag(std::string_view inner) {
    Tag t;
    std::size_t k = 0;
    if (k < inner.size() && inner[k] == '/') {
        t.closing = true;
        ++k;
    }
    auto b = k;
    while (k < inner.size() && !std::isspace(static_cast<unsigned char>(inner[k])) && inner[k] != '/') ++k;
    t.name = lower(inner.substr(b, k - b));
    while (k < inner.size()) {
        while (k < inner.size() && (std::isspace(static_cast<unsigned char>(inner[k])) || inner[k] == '/')) ++k;
        auto nb = k;
        while (k < inner.size() && inner[k] != '=' && !std::isspace(static_cast<unsigned char>(inner[k])) &&
               inner[k] != '/')
            ++k;
        std::string name = lower(inner.substr(nb, k - nb));
        if (name.empty()) {
            ++k;
            continue;
        }
        while (k < inner.size() && std::isspace(static_cast<unsigned char>(inner[k]))) ++k;
        std::string value;
        if (k < inner.size() && inner[k] == '=') {
            ++k;
            while (k < inner.size() && std::isspace(static_cast<unsigned char>(inner[k]))) ++k;
            if (k < inner.size() && (inner[k] == '"' || inner[k] == '\'')) {
                char q = inner[k++];
                auto vb = k;
                while (k < inner.size() && inner[k] != q) ++k;
                value = std::string(inner.substr(vb, k - vb));
                ++k;
            } else {
                auto vb = k;
                while (k < inner.size() && !std::isspace(static_cast<unsigned char>(inner[k]))) ++k;
                value = std::string(inner.substr(vb, k - vb));
            }
        }
        t.attrs[name] = decode_entities(value);
    }
    return t;
}

struct Node {
    bool is_tag = false;
    Tag tag;
    std::string text;
};

std::vector<Node> lex_html(std::string_view html) {
    std::vector<Node> out;
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] == '<') {
            if (html.substr(i, 4) == "<!--") {
                auto e = html.find("-->", i + 4);
                i = e == std::string_view::npos ? html.size() : e + 3;
                continue;
            }
            auto e = html.find('>', i);
            if (e == std::string_view::npos) break;
            auto inner = html.substr(i + 1, e - i - 1);
            i = e + 1;
            if (inner.empty() || inner[0] == '!' || inner[0] == '?') continue;
            Node n;
            n.is_tag = true;
            n.tag = parse_tag(inner);
            // Raw text elements: skip straight to the matching close tag.
            if (!n.tag.closing && (n.tag.name == "script" || n.tag.name == "style")) {
                auto lc = lower(html.substr(i));
                auto close = lc.find("</" + n.tag.name);
                if (close == std::string::npos) {
                    i = html.size();
                } else {
                    auto gt = html.find('>', i + close);
                    i = gt == std::string_view::npos ? html.size() : gt + 1;
                }
                continue;
            }
            out.push_back(std::move(n));
        } else {
            auto e = html.find('<', i);
            if (e == std::string_view::npos) e = html.size();
            Node n;
            n.text = std::string(html.substr(i, e - i));
            out.push_back(std::move(n));
            i = e;
        }
    }
    return out;
}

const std::set<std::string>& boilerplate_tags() {
    static const std::set<std::string> s{"nav", "header", "footer", "aside", "form", "noscript", "svg",
                                         "iframe", "button", "select", "template"};
    return s;
}

const std::set<std::string>& block_tags() {
    static const std::set<std::string> s{"p",  "div", "section", "article", "main", "li",     "ul",
                                         "ol", "br",  "tr",      "table",   "td",   "th",     "blockquote",
                                         "h1", "h2",  "h3",      "h4",      "h5",   "h6",     "pre",
                                         "figure", "figcaption", "dd", "dt", "dl", "hr", "body", "caption"};
    return s;
}

bool void_tag(const std::string& n) {
    return n == "br" || n == "hr" || n == "img" || n == "meta" || n == "link" || n == "input";
}

std::optional<std::string> normalize_date(std::string_view raw) {
    auto t = trim(raw);
    if (t.size() < 10) return std::nullopt;
    std::string d = t.substr(0, 10);
    std::replace(d.begin(), d.end(), '/', '-');
    try {
        return core::format_date(core::parse_date(d));
    } catch (const Error&) {
        return std::nullopt;
    }
}

DocumentMetadata html_metadata(const std::vector<Node>& nodes) {
    DocumentMetadata m;
    std::optional<std::string> title_tag, og_title;
    std::map<std::string, std::string> meta;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!n.is_tag || n.tag.closing) continue;
        if (n.tag.name == "title" && !title_tag && i + 1 < nodes.size() && !nodes[i + 1].is_tag) {
            auto t = collapse_ws(decode_entities(nodes[i + 1].text));
            if (!t.empty()) title_tag = t;
        } else if (n.tag.name == "meta") {
            auto key = n.tag.attrs.count("property") ? n.tag.attrs.at("property")
                                                      : (n.tag.attrs.count("name") ? n.tag.attrs.at("name") : "");
            if (!key.empty() && n.tag.attrs.count("content") && !meta.count(lower(key)))
                meta[lower(key)] = collapse_ws(n.tag.attrs.at("content"));
        } else if (n.tag.name == "link" && n.tag.attrs.count("rel") && lower(n.tag.attrs.at("rel")) == "canonical" &&
                   n.tag.attrs.count("href") && !m.url) {
            m.url = n.tag.attrs.at("href");
        } else if (n.tag.name == "time" && n.tag.attrs.count("datetime") && !meta.count("time")) {
            meta["time"] = n.tag.attrs.at("datetime");
        }
    }
    auto first = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
        for (const char* k : keys)
            if (auto it = meta.find(k); it != meta.end() && !it->second.empty()) return it->second;
        return std::nullopt;
    };
    m.title = first({"og:title", "citation_title", "dc.title"});
    if (!m.title) m.title = title_tag;
    m.organization = first({"og:site_name", "citation_publisher", "publisher", "dc.publisher", "author"});
    for (const char* k : {"article:published_time", "citation_publication_date", "citation_date", "dc.date", "date",
                          "pubdate", "time"})
        if (auto v = first({k}); v && (m.date = normalize_date(*v))) break;
    if (!m.url) m.url = first({"og:url"});
    return m;
}

std::string html_text(const std::vector<Node>& nodes) {
    // Content root: first <article>, else <main>, else everything.
    std::size_t begin = 0, end = nodes.size();
    for (const char* root : {"article", "main"}) {
        auto it = std::find_if(nodes.begin(), nodes.end(),
                               [&](const Node& n) { return n.is_tag && !n.tag.closing && n.tag.name == root; });
        if (it == nodes.end()) continue;
        begin = static_cast<std::size_t>(it - nodes.begin()) + 1;
        int depth = 1;
        for (std::size_t k = begin; k < nodes.size(); ++k) {
            if (!nodes[k].is_tag || nodes[k].tag.name != root) continue;
            depth += nodes[k].tag.closing ? -1 : 1;
            if (depth == 0) {
                end = k;
                break;
            }
        }
        break;
    }

    std::vector<std::string> blocks;
    std::string cur;
    std::size_t link_chars = 0;
    int heading = 0, link_depth = 0, skip_depth = 0;
    bool in_head = false;
    auto flush = [&] {
        auto text = collapse_ws(decode_entities(cur));
        std::size_t chars = text.size();
        if (!text.empty()) {
            if (heading > 0) blocks.push_back(std::string(static_cast<std::size_t>(heading), '#') + " " + text);
            // Link-dominated blocks are navigation residue.
            else if (link_chars * 2 <= chars) blocks.push_back(text);
        }
        cur.clear();
        link_chars = 0;
    };
    for (std::size_t k = begin; k < end; ++k) {
        const auto& n = nodes[k];
        if (!n.is_tag) {
            if (skip_depth == 0 && !in_head) {
                cur += n.text;
                if (link_depth > 0) link_chars += collapse_ws(decode_entities(n.text)).size();
            }
            continue;
        }
        const auto& name = n.tag.name;
        if (name == "head") {
            in_head = !n.tag.closing;
            continue;
        }
        if (name == "title") continue;
        if (boilerplate_tags().count(name) && !void_tag(name)) {
            skip_depth = std::max(0, skip_depth + (n.tag.closing ? -1 : 1));
            continue;
        }
        if (skip_depth > 0) continue;
        if (name == "a") {
            link_depth = std::max(0, link_depth + (n.tag.closing ? -1 : 1));
            continue;
        }
        if (block_tags().count(name)) {
            flush();
            if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6')
                heading = n.tag.closing ? 0 : name[1] - '0';
        } else if (!cur.empty()) {
            cur.push_back(' ');
        }
    }
    flush();
    std::string out;
    for (const auto& b : blocks) {
        if (!out.empty()) out += "\n\n";
        out += b;
    }
    return out;
}

// ---- pdf text layer ----

bool page_number_line(const std::string& t) {
    if (t.empty()) return false;
    if (std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) return true;
    auto l = lower(t);
    return l.rfind("page ", 0) == 0 && word_count(l) <= 4 &&
           std::all_of(l.begin() + 5, l.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == ' ' || c == 'o' || c == 'f'; });
}

int pdf_heading_level(const std::string& para) {
    if (para.empty() || para.find('\n') != std::string::npos) return 0;
    auto words = word_count(para);
    if (words == 0 || words > 10) return 0;
    char last = para.back();
    if (last == '.' || last == ',' || last == ';' || last == ':' || last == '!' || last == '?') return 0;
    // "2.1 Methods" style numbering
    std::size_t k = 0;
    int depth = 0;
    while (k < para.size() && std::isdigit(static_cast<unsigned char>(para[k]))) {
        while (k < para.size() && std::isdigit(static_cast<unsigned char>(para[k]))) ++k;
        ++depth;
        if (k < para.size() && para[k] == '.') ++k;
        else break;
    }
    if (depth > 0 && k < para.size() && para[k] == ' ' && k + 1 < para.size() &&
        std::isupper(static_cast<unsigned char>(para[k + 1])))
        return std::min(depth, 6);
    bool has_alpha = false, all_caps = true;
    for (char c : para)
        if (std::isalpha(static_cast<unsigned char>(c))) {
            has_alpha = true;
            if (std::islower(static_cast<unsigned char>(c))) all_caps = false;
        }
    if (has_alpha && all_caps && words >= 1) return 1;
    std::istringstream in(para);
    std::string w;
    bool title_case = true;
    while (in >> w)
        if (w.size() > 3 && std::isalpha(static_cast<unsigned char>(w[0])) && !std::isupper(static_cast<unsigned char>(w[0])))
            title_case = false;
    return (title_case && words <= 8 && std::isupper(static_cast<unsigned char>(para[0]))) ? 2 : 0;
}

ParsedDocument parse_pdf_text(std::string_view raw) {
    ParsedDocument doc;
    std::vector<std::vector<std::string>> pages(1);
    {
        std::string line;
        for (char c : raw) {
            if (c == '\n' || c == '\f') {
                pages.back().push_back(line);
                line.clear();
                if (c == '\f') pages.emplace_back();
            } else if (c != '\r') {
                line.push_back(c);
            }
        }
        pages.back().push_back(line);
    }
    // Running headers/footers: identical lines on three or more pages.
    std::map<std::string, std::size_t> seen;
    if (pages.size() >= 3)
        for (const auto& p : pages) {
            std::set<std::string> uniq;
            for (const auto& l : p)
                if (auto t = trim(l); !t.empty()) uniq.insert(t);
            for (const auto& t : uniq) ++seen[t];
        }

    std::vector<std::string> lines;
    for (const auto& p : pages)
        for (const auto& l : p) {
            auto t = trim(l);
            if (page_number_line(t) || (seen.count(t) && seen[t] >= 3)) continue;
            lines.push_back(t);
        }

    // Leading "Key: value" metadata lines.
    std::size_t k = 0;
    while (k < lines.size() && lines[k].empty()) ++k;
    for (; k < lines.size(); ++k) {
        const auto& l = lines[k];
        auto colon = l.find(':');
        if (colon == std::string::npos) break;
        auto key = lower(trim(l.substr(0, colon)));
        auto value = trim(l.substr(colon + 1));
        if (key == "title") doc.metadata.title = value;
        else if (key == "organization" || key == "publisher" || key == "author") doc.metadata.organization = value;
        else if (key == "date" || key == "published") doc.metadata.date = normalize_date(value);
        else if (key == "url" || key == "source") doc.metadata.url = value;
        else break;
        lines[k].clear();
    }

    std::vector<std::string> paragraphs;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) paragraphs.push_back(cur);
        cur.clear();
    };
    for (const auto& l : lines) {
        if (l.empty()) {
            flush();
            continue;
        }
        if (cur.empty()) {
            cur = l;
        } else if (cur.size() >= 2 && cur.back() == '-' && std::isalpha(static_cast<unsigned char>(cur[cur.size() - 2])) &&
                   std::islower(static_cast<unsigned char>(l[0]))) {
            cur.pop_back();
            cur += l;
        } else {
            cur += " " + l;
        }
    }
    flush();

    std::string out;
    for (const auto& p : paragraphs) {
        auto para = collapse_ws(p);
        int level = pdf_heading_level(para);
        if (!out.empty()) out += "\n\n";
        out += level > 0 ? std::string(static_cast<std::size_t>(level), '#') + " " + para : para;
        if (level > 0 && !doc.metadata.title) doc.metadata.title = para;
    }
    doc.clean_text = out;
    return doc;
}

}  // namespace

ParsedDocument parse_document(std::string_view raw, std::string_view kind, std::string_view url) {
    ParsedDocument doc;
    if (kind == "html") {
        auto nodes = lex_html(raw);
        doc.metadata = html_metadata(nodes);
        doc.clean_text = html_text(nodes);
    } else if (kind == "pdf_text") {
        doc = parse_pdf_text(raw);
    } else {
        throw Error(ErrorCode::UnsupportedFormat, "unsupported document kind '" + std::string(kind) + "'");
    }
    if (!doc.metadata.url && !url.empty()) doc.metadata.url = std::string(url);
    // A document of headers alone has no body to chunk.
    bool body = false;
    std::istringstream in(doc.clean_text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') body = true;
    if (!body) throw Error(ErrorCode::EmptyAfterCleaning, "no content left after cleaning");
    return doc;
}

TokenizedText tokenize(std::string_view clean_text) {
    TokenizedText out;
    std::vector<std::string> path;
    std::istringstream in{std::string(clean_text)};
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty()) continue;
        std::size_t level = 0;
        while (level < t.size() && t[level] == '#') ++level;
        bool header = level > 0 && level < t.size() && t[level] == ' ';
        if (header) {
            auto title = trim(t.substr(level));
            path.resize(std::min(path.size(), level - 1));
            while (path.size() < level - 1) path.emplace_back();
            path.push_back(title);
            t = title;
        }
        std::istringstream words(t);
        std::string w;
        bool first = true;
        while (words >> w) {
            if (first) out.breaks.insert(out.tokens.size());
            first = false;
            out.tokens.push_back(w);
            out.sections.push_back(path);
        }
    }
    return out;
}

std::vector<ChunkSpan> chunk_spans(std::size_t token_count, const ChunkOptions& o, const std::set<std::size_t>& breaks) {
    if (o.window == 0 || o.stride == 0 || o.stride > o.window)
        throw Error(ErrorCode::InvalidArgument, "chunking needs window > 0 and 0 < stride <= window");
    std::vector<ChunkSpan> out;
    if (token_count == 0) return out;
    std::size_t s = 0;
    while (true) {
        out.push_back({s, std::min(o.window, token_count - s)});
        if (s + o.window >= token_count) break;
        std::size_t next = s + o.stride;
        if (o.align && !breaks.empty()) {
            // Largest break in [next - snap, next] that still moves past s.
            auto lo = next > o.snap ? next - o.snap : 0;
            auto it = breaks.upper_bound(next);
            if (it != breaks.begin()) {
                --it;
                if (*it >= lo && *it > s) next = *it;
            }
        }
        s = next;
    }
    return out;
}

std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options) {
    auto tt = tokenize(doc.clean_text);
    std::vector<Chunk> out;
    auto spans = chunk_spans(tt.tokens.size(), options, tt.breaks);
    for (std::size_t m = 0; m < spans.size(); ++m) {
        Chunk c;
        c.id = doc.id + "#" + std::to_string(m);
        c.doc_id = doc.id;
        c.start = spans[m].start;
        c.tokens.assign(tt.tokens.begin() + static_cast<std::ptrdiff_t>(spans[m].start),
                        tt.tokens.begin() + static_cast<std::ptrdiff_t>(spans[m].start + spans[m].length));
        c.section_path = tt.sections[spans[m].start];
        std::erase_if(c.section_path, [](const std::string& s) { return s.empty(); });
        c.provenance = doc.provenance;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace climagent::textforge
