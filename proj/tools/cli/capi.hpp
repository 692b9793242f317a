/*
   Copyright 2026 The nestlogit Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <nestlogit/nestlogit.h>

namespace nlcli {

// Process exit codes.
enum Exit : int { kOk = 0, kParse = 1, kDomain = 2, kNumeric = 3 };

class CliError : public std::runtime_error {
public:
    CliError(int exit_code, const std::string& message) : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

inline int exit_code_for(nl_status status)
{
    switch (status) {
    case NL_OK:
        return kOk;
    case NL_ERR_OUT_OF_DOMAIN:
    case NL_ERR_DEGENERATE_SHARE:
    case NL_ERR_EMPTY_CHOICE_SET:
        return kDomain;
    case NL_ERR_NO_CONVERGENCE:
    case NL_ERR_SINGULAR_DESIGN:
    case NL_ERR_INTERNAL:
        return kNumeric;
    default:
        return kParse;
    }
}

inline void check(nl_status status)
{
    if (status != NL_OK) {
        throw CliError(exit_code_for(status), std::string(nl_status_name(status)) + ": " + nl_last_error());
    }
}

struct HierarchyDeleter {
    void operator()(nl_hierarchy* p) const { nl_hierarchy_free(p); }
};
struct ShareTableDeleter {
    void operator()(nl_share_table* p) const { nl_share_table_free(p); }
};
struct SynthMarketDeleter {
    void operator()(nl_synth_market* p) const { nl_synth_market_free(p); }
};

using HierarchyPtr = std::unique_ptr<nl_hierarchy, HierarchyDeleter>;
using ShareTablePtr = std::unique_ptr<nl_share_table, ShareTableDeleter>;
using SynthMarketPtr = std::unique_ptr<nl_synth_market, SynthMarketDeleter>;

} // namespace nlcli
