#pragma once

namespace scarsim::detail {

// Library code reports GSL failures through status codes instead of aborting.
void quiet_gsl();

}  // namespace scarsim::detail
