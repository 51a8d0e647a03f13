#pragma once

#define LFP_VERSION_MAJOR 0
#define LFP_VERSION_MINOR 1
#define LFP_VERSION_PATCH 0
#define LFP_VERSION_STRING "0.1.0"
