# Figure rendering package

