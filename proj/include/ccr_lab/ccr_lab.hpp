#ifndef CCR_LAB_CCR_LAB_HPP
#define CCR_LAB_CCR_LAB_HPP

#include "ccr_lab/core.hpp"
#include "ccr_lab/test_space.hpp"
#include "ccr_lab/tensor_algebra.hpp"
#include "ccr_lab/wightman.hpp"
#include "ccr_lab/gns.hpp"
#include "ccr_lab/fock.hpp"
#include "ccr_lab/config.hpp"
#include "ccr_lab/suites.hpp"

#endif  // CCR_LAB_CCR_LAB_HPP
