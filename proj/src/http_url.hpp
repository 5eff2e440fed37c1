#pragma once

#include "divprof/error.hpp"

#include <string>

namespace divprof::detail {

struct HttpUrl {
    std::string scheme_host_port; // "http://host:port", httplib client target
    std::string path;             // "/..." (defaults to "/")
};

// Accepts http://host[:port][/path]; anything else is a provider error.
inline HttpUrl parse_http_url(const std::string& url) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0) {
        throw ProviderError("unsupported endpoint URL (http:// required): " + url);
    }
    const std::size_t host_begin = prefix.size();
    const std::size_t path_begin = url.find('/', host_begin);
    HttpUrl out;
    if (path_begin == std::string::npos) {
        out.scheme_host_port = url;
        out.path = "/";
    } else {
        out.scheme_host_port = url.substr(0, path_begin);
        out.path = url.substr(path_begin);
    }
    if (out.scheme_host_port.size() <= prefix.size()) {
        throw ProviderError("endpoint URL has no host: " + url);
    }
    return out;
}

} // namespace divprof::detail
